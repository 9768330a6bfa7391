"""Node-event chain simulation and entropy analysis."""

import json as _json

from ._necsim import *  # noqa: F401,F403
from ._necsim import _run_json


def run_experiment(config):
    """Run an experiment described by a config dict; returns the report dict."""
    return _json.loads(_run_json(_json.dumps(config)))
