import os
import sys

from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

# hypothesis runs are derandomized; explicit random draws use UEDA_SEED (see helpers.py)
settings.register_profile("ueda", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("ueda")
