"""TPR regret of the entrywise detector against the oracle on the lower-bound family."""

from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import structlog

from core.exceptions import ParameterError
from core.types import DetectorConfig
from detector import EntrywiseDetector, solve_oracle, solve_pew
from models import posterior_nonanomaly
from simgen.lowerbound import LOWERBOUND_MODEL, LowerBoundSpec, gen_lowerbound_instance
from utils.parallel import ordered_map, task_seed
from .metrics import tpr_fpr

logger = structlog.get_logger()

Comparator = Literal["ew", "oracle"]


def regret_at(spec: LowerBoundSpec, seed: int, comparator: Comparator = "ew") -> float:
    """Get TPR(oracle) − TPR(comparator) on one draw of the family at γ = 1/(2e)."""
    rng = np.random.default_rng(seed)
    rates, obs, _, params = gen_lowerbound_instance(spec, rng)
    f_star = posterior_nonanomaly(obs.counts, obs.values_at(rates), params, LOWERBOUND_MODEL).f
    gamma = spec.gamma
    tpr_oracle, _ = tpr_fpr(solve_oracle(f_star, gamma), f_star)
    if comparator == "oracle":
        t = solve_oracle(f_star, gamma)
    else:
        config = DetectorConfig(rank=1, gamma=gamma, anomaly_model=LOWERBOUND_MODEL, seed=seed)
        t = solve_pew(EntrywiseDetector(config, threads=1).prepare(obs).band, gamma)
    return tpr_oracle - tpr_fpr(t, f_star)[0]


def regret_curve(ns: Sequence[int], spec: Optional[LowerBoundSpec] = None, seeds: Sequence[int] = range(20),
                 comparator: Comparator = "ew", threads: Optional[int] = None) -> List[Tuple[int, float]]:
    """Average the regret over seeds (each with fresh random bits) for every size n."""
    if comparator not in ("ew", "oracle"):
        raise ParameterError(f"unknown comparator {comparator!r}")
    if not ns:
        raise ParameterError("need at least one size")
    for n in ns:
        if n < 2 or n % 2:
            raise ParameterError(f"lower-bound sizes must be even, got {n}")
    spec = spec or LowerBoundSpec(n=int(ns[0]))

    tasks = [(int(n), int(s)) for n in ns for s in seeds]

    def run(task: Tuple[int, int]) -> float:
        n, s = task
        return regret_at(spec.with_size(n), task_seed(s, n), comparator)

    values = ordered_map(run, tasks, threads)
    curve = []
    for n in ns:
        mean = float(np.mean([v for (size, _), v in zip(tasks, values) if size == int(n)]))
        curve.append((int(n), mean))
        logger.info(f"Regret at n={n}", mean_regret=mean, seeds=len(seeds))
    return curve


def regret_frame(curve: Sequence[Tuple[int, float]]) -> pd.DataFrame:
    """Tabulate n, mean regret and regret·√n/log^1.5 n."""
    frame = pd.DataFrame(curve, columns=["n", "mean_regret"])
    frame["scaled_regret"] = frame["mean_regret"] * np.sqrt(frame["n"]) / np.log(frame["n"]) ** 1.5
    return frame


def write_regret(curve: Sequence[Tuple[int, float]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    regret_frame(curve).to_csv(path, index=False, float_format="%.17g")
    return path
