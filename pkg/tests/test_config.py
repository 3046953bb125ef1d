import pytest

from robsel.config import ExperimentConfig, THREADS_ENV, load_config, parse_config, worker_count
from robsel.errors import ConfigError
from robsel.logic.objective import SeedPolicy


SYNTHETIC = """
# two modular functions
mode = synthetic
weights = 3,2,1; 1,2,3
k = 1
eporss_T = 40
"""


def test_synthetic_config_defaults():
    config = parse_config(SYNTHETIC)
    assert config.mode == 'synthetic'
    assert config.weights == ((3.0, 2.0, 1.0), (1.0, 2.0, 3.0))
    assert config.m_values == (2,)
    assert config.k == 1
    assert config.eporss_T == 40
    assert config.eporss_seeds == 10
    assert config.seed_policy is SeedPolicy.MEMOIZED_PER_SUBSET
    assert config.timing is True


def test_auto_iterations_is_none():
    config = parse_config(SYNTHETIC.replace("eporss_T = 40", "eporss_T = auto"))
    assert config.eporss_T is None


def test_k_range_is_a_sweep_axis():
    config = parse_config(SYNTHETIC.replace("k = 1", "k = 1..3"))
    assert config.k_values == (1, 2, 3)
    assert config.sweep_axis == 'k'


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("mode = synthetic\nbogus = 1\n")
    assert info.value.line_number == 2
    assert info.value.key == 'bogus'


@pytest.mark.parametrize("text", [
    "mode = nowhere\nweights = 1,2",
    "mode = synthetic\nweights = 1,2\nk = x",
    "mode = synthetic\nweights = 1,2\nr = 0",
    "mode = synthetic\nweights = 1,2;1",
    "mode = synthetic\nweights = 1,2\nalgorithms = greedy,annealing",
    "mode = perturb-ic\ngraphs = g.txt\nm = 1",
    "mode = perturb-ic\ngraphs = g.txt\nk = 1..3\nm = 2..4",
    "mode = multi-graph-general-ic\ngraphs = a.txt,b.txt\nm = 3",
    "mode = synthetic\nweights = 1,2\ntiming = maybe",
    "no equals sign here",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_multi_graph_m_defaults_to_graph_count():
    config = parse_config("mode = multi-graph-general-ic\ngraphs = a.txt, b.txt, c.txt\n")
    assert config.m == 3
    assert config.graph_paths == ('a.txt', 'b.txt', 'c.txt')


def test_load_config_resolves_graphs_next_to_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("mode = perturb-ic\ngraphs = data/g.txt\nm = 3\nk = 5\n", encoding='utf-8')
    config = load_config(str(path))
    assert config.graph_paths == (str(tmp_path / "data" / "g.txt"),)


def test_overrides_and_echo():
    config = parse_config(SYNTHETIC).with_overrides(seed=9, output_dir='elsewhere')
    assert isinstance(config, ExperimentConfig)
    echo = config.echo()
    assert echo['seed'] == 9
    assert echo['output_dir'] == 'elsewhere'
    assert echo['seed_policy'] == 'memoized-per-subset'


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENV, "lots")
    assert worker_count() >= 1
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count() >= 1
