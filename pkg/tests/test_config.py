"""Run context discovery and config overrides."""

import pytest

from bioqakit.config import PipelineConfig, RunContext
from bioqakit.errors import ConfigError


class TestPipelineConfig:
    def test_defaults(self):
        config = PipelineConfig()
        assert (config.strategy, config.window, config.boundary_required) == ("snippet", 1, True)

    @pytest.mark.parametrize(
        "values",
        [{"strategy": "sentence"}, {"window": -1}, {"top_k": 6}, {"head_init": "xavier"}],
    )
    def test_invalid_values(self, values):
        with pytest.raises(ConfigError):
            PipelineConfig(**values)

    def test_unknown_keys(self):
        with pytest.raises(ConfigError, match="colour"):
            PipelineConfig.from_mapping({"colour": "red"})

    def test_digest_tracks_values(self):
        assert PipelineConfig().digest == PipelineConfig().digest
        assert PipelineConfig(window=2).digest != PipelineConfig().digest


class TestRunContext:
    def test_pyproject_table(self, tmp_path):
        (tmp_path / "pyproject.toml").write_text('[tool.bioqakit]\nstrategy = "abstract"\n')
        nested = tmp_path / "a" / "b"
        nested.mkdir(parents=True)
        ctx = RunContext.from_path(nested)
        assert ctx.config.strategy == "abstract"
        assert ctx.config_source == tmp_path / "pyproject.toml"

    def test_pyproject_without_table_is_skipped(self, tmp_path):
        (tmp_path / "pyproject.toml").write_text('[project]\nname = "x"\n')
        ctx = RunContext.from_path(tmp_path)
        assert ctx.config_source != tmp_path / "pyproject.toml"

    def test_explicit_flat_file(self, tmp_path):
        config_file = tmp_path / "run.toml"
        config_file.write_text("window = 3\nstrategy = \"appended\"\n")
        ctx = RunContext.from_path(tmp_path, config_file)
        assert (ctx.config.strategy, ctx.config.window) == ("appended", 3)

    def test_explicit_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            RunContext.from_path(tmp_path, tmp_path / "nope.toml")

    def test_invalid_toml(self, tmp_path):
        config_file = tmp_path / "run.toml"
        config_file.write_text("window = = 3")
        with pytest.raises(ConfigError, match="Invalid TOML"):
            RunContext.from_path(tmp_path, config_file)

    def test_overrides_ignore_unset_flags(self, tmp_path):
        ctx = RunContext(tmp_path, PipelineConfig())
        updated = ctx.with_overrides(window=2, strategy=None)
        assert (updated.config.window, updated.config.strategy) == (2, "snippet")
        assert ctx.config.window == 1
        assert ctx.with_overrides(strategy=None) is ctx

    def test_override_validation(self, tmp_path):
        with pytest.raises(ConfigError):
            RunContext(tmp_path, PipelineConfig()).with_overrides(window=-2)

    def test_resolve(self, tmp_path):
        ctx = RunContext(tmp_path, PipelineConfig())
        assert ctx.resolve("x.json") == tmp_path / "x.json"
        assert ctx.resolve(tmp_path / "y") == tmp_path / "y"
