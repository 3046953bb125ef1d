"""Experiment configuration: flat `key = value` files and environment settings."""

import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from robsel.errors import ConfigError
from robsel.influence.cascade import GeneralICParams
from robsel.logic.objective import SeedPolicy
from robsel.logic.saturate import SaturateConfig

logger = logging.getLogger(__name__)

MODES = ('perturb-ic', 'multi-graph-general-ic', 'synthetic')
ALGORITHMS = ('greedy', 'modified-greedy', 'saturate', 'eporss')
THREADS_ENV = 'ROBSEL_THREADS'

DEFAULT_CONFIG = {
    'mode': 'synthetic',
    'graphs': '',
    'm': '',
    'k': '5',
    'r': '100',
    'node_limit': '200',
    'seed': '0',
    'algorithms': ','.join(ALGORITHMS),
    'eporss_T': 'auto',
    'eporss_seeds': '10',
    'repetitions': '10',
    'saturate_alpha': '1.0',
    'saturate_epsilon': '1e-3',
    'saturate_max_rounds': '60',
    'seed_policy': SeedPolicy.MEMOIZED_PER_SUBSET.value,
    'perturb_lo': '0.9',
    'perturb_hi': '1.1',
    'gic_base': '0.1',
    'gic_increment': '0.05',
    'gic_cap': '1.0',
    'weights': '',
    'output_dir': 'results',
    'timing': 'true',
}


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = 'synthetic'
    graph_paths: Tuple[str, ...] = ()
    m_values: Tuple[int, ...] = ()
    k_values: Tuple[int, ...] = (5,)
    r: int = 100
    node_limit: int = 200
    seed: int = 0
    algorithms: Tuple[str, ...] = ALGORITHMS
    eporss_T: Optional[int] = None  # None means ⌊2e·k²·n⌋
    eporss_seeds: int = 10
    repetitions: int = 10
    saturate: SaturateConfig = field(default_factory=SaturateConfig)
    seed_policy: SeedPolicy = SeedPolicy.MEMOIZED_PER_SUBSET
    perturb_lo: float = 0.9
    perturb_hi: float = 1.1
    general_ic: GeneralICParams = field(default_factory=GeneralICParams)
    weights: Tuple[Tuple[float, ...], ...] = ()
    output_dir: str = 'results'
    timing: bool = True

    @property
    def k(self) -> int:
        return self.k_values[0]

    @property
    def m(self) -> int:
        return self.m_values[0]

    @property
    def sweep_axis(self) -> Optional[str]:
        """'k' or 'm' when that field holds a range, else None."""
        if len(self.k_values) > 1:
            return 'k'
        if len(self.m_values) > 1:
            return 'm'
        return None

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None) -> 'ExperimentConfig':
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes['seed'] = seed
        if output_dir is not None:
            changes['output_dir'] = output_dir
        return replace(self, **changes)

    def echo(self) -> Dict[str, Any]:
        """JSON-friendly view of every field."""
        data = asdict(self)
        data['seed_policy'] = self.seed_policy.value
        return data

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}", key='mode')
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown or not self.algorithms:
            raise ConfigError(f"unknown or empty algorithm list {list(self.algorithms)}", key='algorithms')
        if self.r < 1:
            raise ConfigError("r must be >= 1", key='r')
        if self.eporss_seeds < 1 or self.repetitions < 1:
            raise ConfigError("eporss_seeds and repetitions must be >= 1")
        if self.eporss_T is not None and self.eporss_T < 0:
            raise ConfigError("eporss_T must be >= 0 or 'auto'", key='eporss_T')
        if len(self.k_values) > 1 and len(self.m_values) > 1:
            raise ConfigError("at most one of k and m may be a range")
        if not self.k_values or any(not 1 <= k <= self.node_limit for k in self.k_values):
            raise ConfigError(f"k values must lie in [1, node_limit={self.node_limit}]", key='k')
        if self.mode == 'perturb-ic':
            if len(self.graph_paths) != 1:
                raise ConfigError("perturb-ic mode takes exactly one graph", key='graphs')
            if not self.m_values or min(self.m_values) < 2:
                raise ConfigError("perturb-ic mode needs m >= 2", key='m')
        elif self.mode == 'multi-graph-general-ic':
            if len(self.graph_paths) < 2:
                raise ConfigError("multi-graph mode needs at least two graphs", key='graphs')
            if self.m_values != (len(self.graph_paths),):
                raise ConfigError("multi-graph mode requires m to equal the number of graphs", key='m')
        else:
            if not self.weights:
                raise ConfigError("synthetic mode needs 'weights'", key='weights')
            if len({len(row) for row in self.weights}) != 1:
                raise ConfigError("every weight row needs the same length", key='weights')
            if self.m_values != (len(self.weights),):
                raise ConfigError("synthetic mode requires m to equal the number of weight rows", key='m')


def _int_list(key: str, text: str, line_number: Optional[int]) -> Tuple[int, ...]:
    try:
        if '..' in text:
            start, stop = (int(part) for part in text.split('..', 1))
            if stop < start:
                raise ConfigError(f"empty range {text!r}", key, line_number)
            return tuple(range(start, stop + 1))
        return tuple(int(part) for part in text.split(',') if part.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, list or a..b range, got {text!r}", key, line_number) from None


def _convert(raw: Dict[str, str], lines: Dict[str, int]) -> ExperimentConfig:
    def number(key: str, kind=float):
        try:
            return kind(raw[key])
        except ValueError:
            raise ConfigError(f"expected {kind.__name__}, got {raw[key]!r}", key, lines.get(key)) from None

    def boolean(key: str) -> bool:
        value = raw[key].lower()
        if value not in ('true', 'false', 'yes', 'no', '1', '0'):
            raise ConfigError(f"expected a boolean, got {raw[key]!r}", key, lines.get(key))
        return value in ('true', 'yes', '1')

    try:
        weights = tuple(
            tuple(float(w) for w in row.split(',') if w.strip())
            for row in raw['weights'].split(';') if row.strip()
        )
    except ValueError:
        raise ConfigError(f"bad weights {raw['weights']!r}", 'weights', lines.get('weights')) from None

    try:
        saturate = SaturateConfig(number('saturate_alpha'), number('saturate_epsilon'), number('saturate_max_rounds', int))
        general_ic = GeneralICParams(number('gic_base'), number('gic_increment'), number('gic_cap'))
        seed_policy = SeedPolicy(raw['seed_policy'])
    except ValueError as e:
        raise ConfigError(str(e)) from None

    graph_paths = tuple(p.strip() for p in raw['graphs'].split(',') if p.strip())
    mode = raw['mode']
    if raw['m']:
        m_values = _int_list('m', raw['m'], lines.get('m'))
    elif mode == 'synthetic':
        m_values = (len(weights),)
    elif mode == 'multi-graph-general-ic':
        m_values = (len(graph_paths),)
    else:
        m_values = (3,)

    eporss_T = None if raw['eporss_T'].lower() == 'auto' else number('eporss_T', int)
    return ExperimentConfig(
        mode=mode,
        graph_paths=graph_paths,
        m_values=m_values,
        k_values=_int_list('k', raw['k'], lines.get('k')),
        r=number('r', int),
        node_limit=number('node_limit', int),
        seed=number('seed', int),
        algorithms=tuple(a.strip() for a in raw['algorithms'].split(',') if a.strip()),
        eporss_T=eporss_T,
        eporss_seeds=number('eporss_seeds', int),
        repetitions=number('repetitions', int),
        saturate=saturate,
        seed_policy=seed_policy,
        perturb_lo=number('perturb_lo'),
        perturb_hi=number('perturb_hi'),
        general_ic=general_ic,
        weights=weights,
        output_dir=raw['output_dir'],
        timing=boolean('timing'),
    )


def parse_config(text: str) -> ExperimentConfig:
    """Parses `key = value` lines; '#' starts a comment line."""
    raw = dict(DEFAULT_CONFIG)
    lines: Dict[str, int] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line_number=line_number)
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in DEFAULT_CONFIG:
            raise ConfigError("unknown key", key, line_number)
        raw[key] = value
        lines[key] = line_number
    config = _convert(raw, lines)
    config.validate()
    return config


def load_config(path: str) -> ExperimentConfig:
    text = Path(path).read_text(encoding='utf-8')
    config = parse_config(text)
    # relative graph paths resolve against the config file's directory
    base = Path(path).parent
    graphs = tuple(str(p) if Path(p).is_absolute() else str(base / p) for p in config.graph_paths)
    return replace(config, graph_paths=graphs)


def worker_count() -> int:
    """Worker cap from ROBSEL_THREADS, defaulting to the hardware parallelism."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", THREADS_ENV, value)
    return os.cpu_count() or 1
