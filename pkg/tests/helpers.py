"""Project-building helpers used by several test modules."""

from __future__ import annotations

from pathlib import Path

from jobtuner.project import Project, load_project


def write_synthetic_project(root: Path, params: str, job: str) -> Project:
    root.mkdir(parents=True, exist_ok=True)
    (root / "params.conf").write_text(params)
    (root / "job.conf").write_text(job)
    return load_project(root)


def bowl_job_conf(
    base_s: float = 100.0,
    weights: str = "50,80",
    optimum: str = "0.7,0.3",
    noise_sd_s: float = 0.0,
    repetitions: int = 1,
    surface_seed: int = 0,
    family: str = "bowl",
) -> str:
    return (
        "executor=synthetic\n"
        f"family={family}\n"
        f"base_s={base_s}\n"
        f"weights={weights}\n"
        f"optimum={optimum}\n"
        f"noise_sd_s={noise_sd_s}\n"
        f"repetitions={repetitions}\n"
        f"surface_seed={surface_seed}\n"
    )


UNIT_SQUARE_PARAMS = (
    "a float min=0 max=1 step=1e-6 default=0.5\n"
    "b float min=0 max=1 step=1e-6 default=0.5\n"
)
