from hypothesis import HealthCheck, settings

settings.register_profile(
    "evofam",
    deadline=None,
    derandomize=True,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("evofam")
