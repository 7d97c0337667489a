from hypothesis import HealthCheck, settings

# Numeric property tests do real linear algebra per example; wall-clock
# deadlines only add flakiness on loaded machines.
settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")
