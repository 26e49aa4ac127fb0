import json

import pytest

from ocrforge.config import (
    FontConfig,
    GeneratorConfig,
    color_to_hex,
    parse_color,
    parse_range,
)
from ocrforge.errors import ConfigValidationError
from ocrforge.renderer import BackgroundSpec


def base_config(three_font_paths, corpus_file, **kw):
    a, b, c = three_font_paths
    defaults = dict(
        corpus_path=corpus_file,
        fonts=(FontConfig(a, 40.0), FontConfig(b, 35.0), FontConfig(c, 25.0)),
        count=10,
    )
    defaults.update(kw)
    return GeneratorConfig(**defaults)


class TestRoundTrip:
    def test_default_round_trip(self, three_font_paths, corpus_file):
        cfg = base_config(three_font_paths, corpus_file)
        assert GeneratorConfig.from_json(cfg.to_json()) == cfg

    def test_nontrivial_round_trip(self, three_font_paths, corpus_file, tmp_path):
        from PIL import Image

        bg_img = tmp_path / "tex.png"
        Image.new("RGB", (8, 8), (230, 230, 210)).save(bg_img)
        mix = BackgroundSpec(
            mode="mix",
            mix_options=(
                (BackgroundSpec(mode="color", color=(255, 255, 255)), 60.0),
                (BackgroundSpec(mode="image", image_path=str(bg_img)), 40.0),
            ),
        )
        cfg = base_config(
            three_font_paths,
            corpus_file,
            mode="ngram",
            background=mix,
            text_color=(12, 34, 56),
            direction="ltr",
            alignment="right",
            size_distribution="uniform",
            storage_mode="chunked",
            batch_size=7,
            workers=4,
            antialias=False,
            split_ratio=0.75,
            output_format="trocr",
        )
        again = GeneratorConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_json_is_stable(self, three_font_paths, corpus_file):
        cfg = base_config(three_font_paths, corpus_file)
        assert cfg.to_json() == GeneratorConfig.from_json(cfg.to_json()).to_json()


class TestValidation:
    def test_percentage_sum_error(self, three_font_paths, corpus_file):
        a, b, _ = three_font_paths
        with pytest.raises(ConfigValidationError) as ei:
            GeneratorConfig(
                corpus_path=corpus_file,
                fonts=(FontConfig(a, 60.0), FontConfig(b, 50.0)),
                count=5,
            )
        paths = [p for p, _ in ei.value.errors]
        assert "fonts[].percentage" in paths
        assert "percentages sum to 110" in str(ei.value)

    def test_dimension_floor(self, three_font_paths, corpus_file):
        with pytest.raises(ConfigValidationError):
            base_config(three_font_paths, corpus_file, width=4)

    def test_split_ratio_bounds(self, three_font_paths, corpus_file):
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ConfigValidationError):
                base_config(three_font_paths, corpus_file, split_ratio=bad)

    def test_count_positive(self, three_font_paths, corpus_file):
        with pytest.raises(ConfigValidationError):
            base_config(three_font_paths, corpus_file, count=0)

    def test_from_dict_collects_paths(self):
        with pytest.raises(ConfigValidationError) as ei:
            GeneratorConfig.from_dict(
                {
                    "corpus": "",
                    "fonts": [],
                    "count": "many",
                    "script_ranges": ["zzzz"],
                }
            )
        paths = {p for p, _ in ei.value.errors}
        assert "count" in paths
        assert "script_ranges[0]" in paths

    def test_unknown_mode(self, three_font_paths, corpus_file):
        with pytest.raises(ConfigValidationError) as ei:
            base_config(three_font_paths, corpus_file, mode="paragraph")
        assert any(p == "segmentation.mode" for p, _ in ei.value.errors)


class TestHelpers:
    def test_parse_color_hex(self):
        assert parse_color("#0A141E") == (10, 20, 30)

    def test_parse_color_preset(self):
        assert parse_color("white") == (255, 255, 255)

    def test_parse_color_invalid(self):
        with pytest.raises(ValueError):
            parse_color("not-a-color")

    def test_color_round_trip(self):
        for c in [(0, 0, 0), (255, 255, 255), (1, 2, 3)]:
            assert parse_color(color_to_hex(c)) == c

    def test_parse_range(self):
        assert parse_range("0600-06FF") == (0x0600, 0x06FF)
        with pytest.raises(ValueError):
            parse_range("0600")

    def test_derived_policies(self, three_font_paths, corpus_file):
        cfg = base_config(three_font_paths, corpus_file)
        assert cfg.script_policy().allows(0x0628)
        assert not cfg.script_policy().allows(0x0900)
        assert cfg.size_policy().mu == 35
        assert cfg.segmentation_config().mode == "word"

    def test_latin_only_ranges_keep_no_diacritics(self, three_font_paths, corpus_file):
        cfg = base_config(
            three_font_paths, corpus_file, script_ranges=((0x0020, 0x007F),)
        )
        assert cfg.script_policy().preserved_diacritics == frozenset()

    def test_config_echo_survives_json(self, three_font_paths, corpus_file):
        cfg = base_config(three_font_paths, corpus_file)
        echoed = json.loads(json.dumps(cfg.to_dict()))
        assert GeneratorConfig.from_dict(echoed) == cfg
