"""Search strategies and their registry.

Strategy ids (the CLI names): grid, compass, nelder-mead, bobyqa-lite.
"""

from __future__ import annotations

from dataclasses import fields

from ..errors import UnknownStrategyError
from ..paramspace import ParamSpace
from .base import Searcher
from .compass import CompassOptions, CompassSearcher
from .grid import GridSearcher
from .nelder_mead import NelderMeadOptions, NelderMeadSearcher
from .trust_region import TrustRegionOptions, TrustRegionSearcher

STRATEGIES: dict[str, type[Searcher]] = {
    GridSearcher.strategy_id: GridSearcher,
    CompassSearcher.strategy_id: CompassSearcher,
    NelderMeadSearcher.strategy_id: NelderMeadSearcher,
    TrustRegionSearcher.strategy_id: TrustRegionSearcher,
}

OPTION_TYPES = {
    CompassSearcher.strategy_id: CompassOptions,
    NelderMeadSearcher.strategy_id: NelderMeadOptions,
    TrustRegionSearcher.strategy_id: TrustRegionOptions,
}


def strategy_ids() -> list[str]:
    return list(STRATEGIES)


def make_searcher(strategy_id: str, space: ParamSpace, options=None) -> Searcher:
    try:
        cls = STRATEGIES[strategy_id]
    except KeyError:
        raise UnknownStrategyError(strategy_id, strategy_ids()) from None
    return cls(space, options)


def options_to_dict(strategy_id: str, options) -> dict[str, object]:
    """Flatten a strategy's options for the session manifest."""
    if options is None:
        opt_type = OPTION_TYPES.get(strategy_id)
        if opt_type is None:
            return {}
        options = opt_type()
    return {f.name: getattr(options, f.name) for f in fields(options)}


def options_from_dict(strategy_id: str, data: dict[str, str]):
    """Rebuild a strategy's options from manifest strings."""
    opt_type = OPTION_TYPES.get(strategy_id)
    if opt_type is None:
        return None
    kwargs = {}
    for f in fields(opt_type):
        if f.name not in data:
            continue
        raw = data[f.name]
        if f.type in ("bool", bool):
            kwargs[f.name] = raw.lower() in ("1", "true", "yes")
        else:
            kwargs[f.name] = float(raw)
    return opt_type(**kwargs)


__all__ = [
    "CompassOptions",
    "CompassSearcher",
    "GridSearcher",
    "NelderMeadOptions",
    "NelderMeadSearcher",
    "STRATEGIES",
    "Searcher",
    "TrustRegionOptions",
    "TrustRegionSearcher",
    "make_searcher",
    "options_from_dict",
    "options_to_dict",
    "strategy_ids",
]
