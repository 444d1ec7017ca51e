"""Resolved configuration of one dpne run.

Built-in defaults are overridden by the ``run:`` section of a YAML config
file, which is overridden by command-line flags. The resolved RunConfig is
echoed next to every output as ``run_config.yaml``; feeding that file back
through ``--config`` reproduces the run.
"""

import dataclasses
import math
from dataclasses import dataclass, fields
from typing import Any, Dict, Mapping, Optional, Tuple

from ..common.errors import ConfigError
from ..corpus.loader import CorpusFormat
from ..extraction.dpne import ExtractionMode
from ..extraction.validity import PruningRule
from ..privacy.accounting import (
    NoiseSchedule,
    PrivacyTarget,
    allocate_schedule,
    noiseless_schedule,
)

RUN_CONFIG_FILE = "run_config.yaml"

_FLOAT_FIELDS = {
    "epsilon",
    "delta",
    "eta",
    "decay",
    "sample_p",
    "noiseless_threshold",
    "synth_zipf",
}
_INT_FIELDS = {
    "max_len",
    "delta0",
    "seed",
    "threads",
    "synth_users",
    "synth_tokens_per_user",
    "synth_vocab",
}


@dataclass(frozen=True)
class RunConfig:
    """Every parameter that determines a run's output."""

    input: Optional[str] = None
    input_format: str = CorpusFormat.JSONL_TEXT.value
    output: str = "out"
    epsilon: float = 4.0
    delta: float = 1e-7
    max_len: int = 9
    delta0: int = 300
    caps: Optional[Tuple[int, ...]] = None
    eta: float = 0.01
    decay: float = 1.0
    sample_p: Optional[float] = None
    prune: str = PruningRule.BOTH_SIDE.value
    mode: str = ExtractionMode.SCALABLE.value
    seed: int = 0
    lowercase: bool = True
    threads: int = 1
    unsafe_no_privacy: bool = False
    noiseless_threshold: float = 0.0
    synth_users: int = 1000
    synth_tokens_per_user: int = 20
    synth_vocab: int = 2000
    synth_zipf: float = 1.1

    def __post_init__(self) -> None:
        if self.caps is not None:
            object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        self._validate()

    def _validate(self) -> None:
        def require(condition: bool, message: str) -> None:
            if not condition:
                raise ConfigError(message)

        require(
            self.input_format in {f.value for f in CorpusFormat},
            f"input_format must be one of {[f.value for f in CorpusFormat]}, "
            f"got {self.input_format!r}",
        )
        require(
            isinstance(self.epsilon, (int, float))
            and math.isfinite(self.epsilon)
            and self.epsilon > 0,
            f"epsilon must be a positive real, got {self.epsilon}",
        )
        require(0.0 < self.delta < 1.0, f"delta must lie in (0, 1), got {self.delta}")
        require(self.max_len >= 1, f"max_len must be >= 1, got {self.max_len}")
        require(self.delta0 >= 1, f"delta0 must be >= 1, got {self.delta0}")
        if self.caps is not None:
            require(
                len(self.caps) == self.max_len,
                f"caps needs {self.max_len} entries, got {len(self.caps)}",
            )
            require(all(c >= 1 for c in self.caps), f"caps must be >= 1, got {self.caps}")
        require(0.0 < self.eta < 1.0, f"eta must lie in (0, 1), got {self.eta}")
        require(0.0 < self.decay <= 1.0, f"decay must lie in (0, 1], got {self.decay}")
        require(
            self.sample_p is None or 0.0 < self.sample_p <= 1.0,
            f"sample_p must lie in (0, 1], got {self.sample_p}",
        )
        require(
            self.prune in {r.value for r in PruningRule},
            f"prune must be 'both' or 'single', got {self.prune!r}",
        )
        require(
            self.mode in {m.value for m in ExtractionMode},
            f"mode must be 'reference' or 'scalable', got {self.mode!r}",
        )
        require(self.threads >= 1, f"threads must be >= 1, got {self.threads}")
        require(
            math.isfinite(self.noiseless_threshold),
            f"noiseless_threshold must be finite, got {self.noiseless_threshold}",
        )
        require(self.synth_users >= 0, f"synth_users must be >= 0, got {self.synth_users}")
        require(self.synth_tokens_per_user >= 1, "synth_tokens_per_user must be >= 1")
        require(self.synth_vocab >= 1, "synth_vocab must be >= 1")
        require(self.synth_zipf > 0, "synth_zipf must be > 0")

    @classmethod
    def from_mapping(cls, data: Optional[Mapping[str, Any]]) -> "RunConfig":
        """Build from a mapping such as a config file's ``run:`` section.

        Raises:
            ConfigError: On unknown keys or invalid values
        """
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown run config keys: {', '.join(unknown)}")
        try:
            # YAML reads exponent literals such as 1e-7 as strings
            for name in _FLOAT_FIELDS & set(data):
                if data[name] is not None:
                    data[name] = float(data[name])
            for name in _INT_FIELDS & set(data):
                data[name] = int(data[name])
            return cls(**data)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid run config: {e}") from e

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for YAML serialization."""
        data = dataclasses.asdict(self)
        if self.caps is not None:
            data["caps"] = list(self.caps)
        return data

    @property
    def pruning_rule(self) -> PruningRule:
        return PruningRule(self.prune)

    @property
    def extraction_mode(self) -> ExtractionMode:
        return ExtractionMode(self.mode)

    @property
    def corpus_format(self) -> CorpusFormat:
        return CorpusFormat(self.input_format)

    @property
    def level_caps(self) -> Tuple[int, ...]:
        return self.caps if self.caps is not None else (self.delta0,) * self.max_len

    @property
    def target(self) -> PrivacyTarget:
        return PrivacyTarget(self.epsilon, self.delta)


def build_schedule(config: RunConfig) -> NoiseSchedule:
    """Calibrated schedule for ``config``, or the noiseless one in unsafe mode."""
    if config.unsafe_no_privacy:
        return noiseless_schedule(
            config.max_len,
            config.level_caps,
            threshold=config.noiseless_threshold,
            eta=config.eta,
            sample_p=config.sample_p,
        )
    return allocate_schedule(
        config.target,
        config.max_len,
        decay=config.decay,
        caps=config.level_caps,
        eta=config.eta,
        sample_p=config.sample_p,
    )
