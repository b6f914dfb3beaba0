import os

from hypothesis import settings

settings.register_profile("fracdo", deadline=None, max_examples=30, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fracdo"))
