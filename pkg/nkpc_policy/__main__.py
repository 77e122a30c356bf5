import sys

from nkpc_policy.cli.runner import run

sys.exit(run())
