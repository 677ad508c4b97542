"""doit Script.

```sh
# Ensure that packages are installed
poetry install
# List Tasks
poetry run doit list
# (Or use a poetry shell)
# > poetry shell
# > doit list

# Run tasks individually (examples below)
poetry run doit run ptw_ff
poetry doit run coverage open_test_docs
# Or all of the tasks in DOIT_CONFIG
poetry run doit
```

"""

from calcipy.doit_tasks import *  # noqa: F401,F403,H303 (Run 'doit list' to see tasks). skipcq: PYL-W0614
from calcipy.doit_tasks import DOIT_CONFIG_RECOMMENDED
from calcipy.doit_tasks.base import debug_task
from calcipy.log_helpers import activate_debug_logging

from adjustable_auction import __pkg_name__

activate_debug_logging(pkg_names=[__pkg_name__])

# Create list of all tasks run with `poetry run doit`
DOIT_CONFIG = DOIT_CONFIG_RECOMMENDED


def task_smoke_cli():
    """Run each CLI verb once on the bundled scenario."""
    scenario = 'scenarios/optimal_beta2.cfg'
    return debug_task([
        'poetry run adjustable-auction analyze --beta 2',
        'poetry run adjustable-auction compare --beta 1,2,4',
        f'poetry run adjustable-auction -v simulate --config {scenario} --workers 0',
        f'poetry run adjustable-auction verify --config {scenario}',
    ])
