from functools import lru_cache
from pathlib import Path

import yaml

CONFIG_FILE_PATH = Path(__file__).parent / 'conf' / 'config.yaml'


@lru_cache(maxsize=None)
def load_settings() -> dict:
    """Return the package settings read from CONFIG_FILE_PATH."""
    with open(CONFIG_FILE_PATH) as f:
        return yaml.safe_load(f)
