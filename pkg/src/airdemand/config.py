"""Run configuration read from a TOML document.

Layout::

    seed = 0                      # default for data.seed and split.seed
    [data]
    path = "rpk.csv"              # or: synthetic = true, plus n/noise_sd/...
    [split]
    proportions = [0.7, 0.15, 0.15]
    mode = "random"
    [report]
    out = "report"
    alpha = 0.05
    ttest = "pooled"
    reference_total = 8686.0      # default: sum of the last four quarters
    [models]
    enabled = ["mlr", "ga", "ann", "anfis", "svr", "rtree"]
    [models.ann]
    hidden = 10

Unknown keys anywhere are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import BadConfig, ConfigError
from .models import MODEL_KEYS, get_spec


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 42
    seed: int | None = None
    noise_sd: float = 50.0  # about 1% of the mean level, so model errors differ
    quadratic: float = 0.0
    quadratic_feature: int = 0


@dataclass(frozen=True)
class DataConfig:
    path: str | None = None
    synthetic: SyntheticSpec | None = None

    def __post_init__(self):
        if (self.path is None) == (self.synthetic is None):
            raise BadConfig("[data] needs exactly one of 'path' or 'synthetic = true'")


@dataclass(frozen=True)
class SplitConfig:
    proportions: tuple[float, float, float] = (0.70, 0.15, 0.15)
    mode: str = "random"
    seed: int | None = None

    def __post_init__(self):
        if len(self.proportions) != 3:
            raise BadConfig("[split] proportions needs three entries")
        if self.mode not in ("random", "chronological"):
            raise BadConfig("[split] mode must be 'random' or 'chronological'")


@dataclass(frozen=True)
class ReportConfig:
    out: str = "report"
    alpha: float = 0.05
    ttest: str = "pooled"
    reference_total: float | None = None
    formats: tuple[str, ...] = ("text", "svg", "csv", "json")

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise BadConfig("[report] alpha must lie in (0, 1)")
        if self.ttest not in ("pooled", "welch"):
            raise BadConfig("[report] ttest must be 'pooled' or 'welch'")
        if self.reference_total is not None and not self.reference_total > 0:
            raise BadConfig("[report] reference_total must be positive")
        bad = set(self.formats) - {"text", "svg", "csv", "json"}
        if bad:
            raise BadConfig(f"[report] unknown formats: {', '.join(sorted(bad))}")


@dataclass(frozen=True)
class RunConfig:
    data: DataConfig = DataConfig(synthetic=SyntheticSpec())
    split: SplitConfig = SplitConfig()
    report: ReportConfig = ReportConfig()
    enabled: tuple[str, ...] = MODEL_KEYS
    models: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        for key in self.enabled:
            get_spec(key)
        if len(set(self.enabled)) != len(self.enabled):
            raise BadConfig("[models] enabled lists a model twice")
        # fill in defaults for every enabled family
        merged = {k: self.models.get(k) or get_spec(k).make_config() for k in self.enabled}
        object.__setattr__(self, "models", merged)
        object.__setattr__(self, "enabled", tuple(k for k in MODEL_KEYS if k in self.enabled))

    @property
    def split_seed(self) -> int:
        return self.seed if self.split.seed is None else self.split.seed

    @property
    def data_seed(self) -> int:
        s = self.data.synthetic
        return self.seed if s is None or s.seed is None else s.seed

    def with_overrides(
        self, seed: int | None = None, out: str | None = None, alpha: float | None = None, synthetic: bool = False
    ) -> "RunConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if out is not None or alpha is not None:
            kw = {k: v for k, v in (("out", out), ("alpha", alpha)) if v is not None}
            cfg = replace(cfg, report=replace(cfg.report, **kw))
        if synthetic and cfg.data.synthetic is None:
            cfg = replace(cfg, data=DataConfig(synthetic=SyntheticSpec()))
        return cfg


def _take(section: Any, cls: type, where: str, convert: Mapping[str, Any] = {}) -> Any:
    if section is None:
        return cls()
    if not isinstance(section, dict):
        raise BadConfig(f"{where} must be a table")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise BadConfig(f"unknown key(s) in {where}: {', '.join(unknown)}")
    kw = {k: (convert[k](v) if k in convert else v) for k, v in section.items()}
    try:
        return cls(**kw)
    except TypeError as exc:
        raise BadConfig(f"{where}: {exc}") from exc


def _data_section(section: Any) -> DataConfig:
    if section is None:
        return DataConfig(synthetic=SyntheticSpec())
    if not isinstance(section, dict):
        raise BadConfig("[data] must be a table")
    section = dict(section)
    synthetic = section.pop("synthetic", False)
    path = section.pop("path", None)
    if synthetic is True:
        return DataConfig(path=path, synthetic=_take(section, SyntheticSpec, "[data]"))
    if synthetic is not False:
        raise BadConfig("[data] synthetic must be true or false")
    if section:
        raise BadConfig(f"keys {', '.join(sorted(section))} in [data] only apply with synthetic = true")
    return DataConfig(path=path)


def parse_config(doc: Mapping[str, Any], base_dir: Path | None = None) -> RunConfig:
    doc = dict(doc)
    allowed = {"seed", "data", "split", "report", "models"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise BadConfig(f"unknown top-level key(s): {', '.join(unknown)}")

    data = _data_section(doc.get("data"))
    if data.path is not None and base_dir is not None and not Path(data.path).is_absolute():
        data = DataConfig(path=str(base_dir / data.path))
    split = _take(doc.get("split"), SplitConfig, "[split]", {"proportions": tuple})
    report = _take(doc.get("report"), ReportConfig, "[report]", {"formats": tuple})

    models_doc = dict(doc.get("models") or {})
    enabled = tuple(models_doc.pop("enabled", MODEL_KEYS))
    sections = {}
    for key, section in models_doc.items():
        if not isinstance(section, dict):
            raise BadConfig(f"[models] has unexpected key {key!r}")
        sections[key] = get_spec(key).make_config(section)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise BadConfig("seed must be an integer")
    return RunConfig(data=data, split=split, report=report, enabled=enabled, models=sections, seed=seed)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise BadConfig(f"{path}: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)
