"""Command modules for bioqakit."""

# Import all commands to register them via side effects
from . import audit  # noqa: F401
from . import convert  # noqa: F401
from . import dedup  # noqa: F401
from . import evaluate  # noqa: F401
from . import filter  # noqa: F401
from . import reduce  # noqa: F401
from . import stats  # noqa: F401
from . import train_toy  # noqa: F401
from . import validate  # noqa: F401
