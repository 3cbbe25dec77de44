"""Small-network nonlinear least-squares toolkit: a 2-h-2 perceptron trained
by Levenberg-Marquardt, with a CLI reproducing a composite-material tensile
study end to end."""

from importlib import resources

__version__ = "0.1.0"

FIXTURE_NAMES = (
    "table1_published.csv",
    "table1_reconstructed.csv",
    "table2_validation.csv",
    "table2_paper_sim.csv",
    "table3_recall_inputs.csv",
)


def fixture_path(name: str):
    """Filesystem path of a bundled fixture CSV."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    return resources.files(__package__) / "fixtures" / name
