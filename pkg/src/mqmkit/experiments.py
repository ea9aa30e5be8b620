"""Experiment harness: model grid, training-size curve, head comparison.

Every experiment trains across several seeds and reports seed averages.
The grid crosses the reference-based and reference-free feature
configurations with the multi-score head; the size curve retrains on
balanced prefixes of the training split; the head comparison reports the
overall-quality correlation of the single-score head, the multi-score head
(predictions summed), and their difference (multi minus single).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from statistics import mean
from typing import Mapping, Optional, Sequence

from .corpus import Split
from .regressor import RegressorConfig, Target, evaluate, train
from .taxonomy import TranslationUnit

__all__ = [
    "DEFAULT_SIZES",
    "InsufficientData",
    "SeedStat",
    "ExperimentTables",
    "run_experiment_suite",
]

DEFAULT_SIZES = (200, 400, 600, 800, 1000)
TAU_KEYS = ("accuracy", "fluency", "style", "overall")


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SeedStat:
    mean: float
    per_seed: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"mean": self.mean, "per_seed": list(self.per_seed)}


def _seed_stat(values: Sequence[float]) -> SeedStat:
    return SeedStat(mean=mean(values), per_seed=tuple(values))


@dataclass
class ExperimentTables:
    """All three experiment outputs plus provenance (seeds, sizes, warnings)."""

    grid: dict[str, dict[str, dict[str, SeedStat]]]
    size_curve: list[dict]
    head_comparison: dict[str, dict]
    seeds: tuple[int, ...]
    sizes: tuple[int, ...]
    variants: tuple[str, ...]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "sizes": list(self.sizes),
            "variants": list(self.variants),
            "warnings": list(self.warnings),
            "grid": {
                mode: {
                    variant: {key: stat.to_dict() for key, stat in taus.items()}
                    for variant, taus in by_variant.items()
                }
                for mode, by_variant in self.grid.items()
            },
            "size_curve": [
                {
                    "size": point["size"],
                    "taus": {
                        variant: {key: stat.to_dict() for key, stat in taus.items()}
                        for variant, taus in point["taus"].items()
                    },
                }
                for point in self.size_curve
            ],
            "head_comparison": {
                mode: {
                    "single": row["single"].to_dict(),
                    "multi": row["multi"].to_dict(),
                    "delta": row["delta"],
                    "delta_per_seed": list(row["delta_per_seed"]),
                }
                for mode, row in self.head_comparison.items()
            },
        }

    def render_text(self, variant: str = "eq5") -> str:
        from .tables import render_table

        lines = []
        lines.append(f"Model grid, multi-score head ({variant})")
        rows = [
            [mode]
            + [f"{self.grid[mode][variant][key].mean:.3f}" for key in TAU_KEYS]
            for mode in self.grid
        ]
        lines.append(render_table(["mode", *TAU_KEYS], rows))

        lines.append("")
        lines.append(f"Training-size curve ({variant})")
        rows = [
            [str(point["size"])]
            + [f"{point['taus'][variant][key].mean:.3f}" for key in TAU_KEYS]
            for point in self.size_curve
        ]
        lines.append(render_table(["size", *TAU_KEYS], rows))

        lines.append("")
        lines.append(f"Single vs multi head, overall quality ({variant})")
        rows = [
            [
                mode,
                f"{row['single'].mean:.3f}",
                f"{row['multi'].mean:.3f}",
                f"{row['delta']:+.3f}",
            ]
            for mode, row in self.head_comparison.items()
        ]
        lines.append(render_table(["mode", "single", "multi", "delta"], rows))

        for message in self.warnings:
            lines.append("")
            lines.append(f"warning: {message}")
        return "\n".join(lines) + "\n"

    def curve_csv(self) -> str:
        lines = ["size,variant," + ",".join(TAU_KEYS)]
        for point in self.size_curve:
            for variant in self.variants:
                taus = point["taus"][variant]
                lines.append(
                    f"{point['size']},{variant},"
                    + ",".join(f"{taus[key].mean:.6f}" for key in TAU_KEYS)
                )
        return "\n".join(lines) + "\n"


def _paired(
    units: Sequence[TranslationUnit], targets: Mapping[str, Target]
) -> list[tuple[TranslationUnit, Target]]:
    missing = [unit.id for unit in units if unit.id not in targets]
    if missing:
        raise ValueError(f"no gold targets for units: {missing[:5]}")
    return [(unit, targets[unit.id]) for unit in units]


def _tau_stats(
    train_data: Sequence[tuple[TranslationUnit, Target]],
    test_data: Sequence[tuple[TranslationUnit, Target]],
    cfg: RegressorConfig,
    seeds: Sequence[int],
    variants: Sequence[str],
) -> dict[str, dict[str, SeedStat]]:
    per_variant: dict[str, dict[str, list[float]]] = {
        variant: {key: [] for key in TAU_KEYS} for variant in variants
    }
    for seed in seeds:
        model = train(train_data, replace(cfg, seed=seed))
        for variant in variants:
            report = evaluate(model, test_data, variant=variant)
            values = report.tau_values()
            for key in TAU_KEYS:
                per_variant[variant][key].append(values[key])
    return {
        variant: {key: _seed_stat(values) for key, values in taus.items()}
        for variant, taus in per_variant.items()
    }


def _clip_sizes(sizes: Sequence[int], available: int) -> tuple[tuple[int, ...], Optional[str]]:
    clipped = []
    changed = False
    for size in sizes:
        actual = min(size, available)
        changed = changed or actual != size
        if actual not in clipped:
            clipped.append(actual)
    if not clipped:
        raise InsufficientData("no usable training sizes")
    message = None
    if changed:
        message = (
            f"requested sizes {tuple(sizes)} exceed the training split "
            f"({available} units); running {tuple(clipped)}"
        )
    return tuple(clipped), message


def run_experiment_suite(
    split: Split,
    targets: Mapping[str, Target],
    base_cfg: RegressorConfig = RegressorConfig(),
    sizes: Sequence[int] = DEFAULT_SIZES,
    seeds: Optional[Sequence[int]] = None,
    variants: Sequence[str] = ("eq5", "tau_b"),
) -> ExperimentTables:
    """Run the full experiment suite on a scored split.

    ``targets`` maps unit id to its gold score. Requested curve sizes
    larger than the training split are clipped with a warning; the train
    part is interleaved per corpus, so prefixes keep the corpus balance.
    """
    if seeds is None:
        seeds = (base_cfg.seed, base_cfg.seed + 1, base_cfg.seed + 2)
    train_data = _paired(split.train, targets)
    test_data = _paired(split.test, targets)
    suite_warnings: list[str] = []

    grid: dict[str, dict[str, dict[str, SeedStat]]] = {}
    for mode in ("mte", "qe"):
        cfg = replace(base_cfg, mode=mode, head="multi")
        grid[mode] = _tau_stats(train_data, test_data, cfg, seeds, variants)

    clipped_sizes, clip_message = _clip_sizes(sizes, len(train_data))
    if clip_message:
        warnings.warn(clip_message)
        suite_warnings.append(clip_message)
    size_curve = []
    for size in clipped_sizes:
        cfg = replace(base_cfg, head="multi")
        size_curve.append(
            {
                "size": size,
                "taus": _tau_stats(train_data[:size], test_data, cfg, seeds, variants),
            }
        )

    head_comparison: dict[str, dict] = {}
    for mode in ("mte", "qe"):
        single = _tau_stats(
            train_data, test_data, replace(base_cfg, mode=mode, head="single"), seeds, variants
        )
        multi = grid[mode]
        primary = variants[0]
        single_stat = single[primary]["overall"]
        multi_stat = multi[primary]["overall"]
        head_comparison[mode] = {
            "single": single_stat,
            "multi": multi_stat,
            "delta": multi_stat.mean - single_stat.mean,
            "delta_per_seed": tuple(
                m - s for m, s in zip(multi_stat.per_seed, single_stat.per_seed)
            ),
        }

    return ExperimentTables(
        grid=grid,
        size_curve=size_curve,
        head_comparison=head_comparison,
        seeds=tuple(seeds),
        sizes=clipped_sizes,
        variants=tuple(variants),
        warnings=suite_warnings,
    )
