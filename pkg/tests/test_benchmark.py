"""Prompt benchmark schema, validation, persistence, and corpus statistics."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_record
from videval.benchmark import (
    AMPLITUDES,
    COLOR_PALETTE,
    META_CLASSES,
    SUB_TYPES,
    Benchmark,
    ObjectSpec,
    benchmark_stats,
    builtin_benchmark_path,
    default_action_vocabulary,
    default_object_vocabulary,
    load_benchmark,
    record_from_dict,
    record_to_dict,
    save_benchmark,
    validate_benchmark,
    validate_record,
    word_count,
)
from videval.errors import ParseError, ValidationError


class TestValidation:
    def test_minimal_valid_record_passes(self):
        validate_record(make_record())

    def test_meta_class_closed_set(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(meta_class="vehicle"))
        assert err.value.field == "meta_class"

    def test_sub_type_closed_set(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(sub_type="weird"))
        assert err.value.field == "sub_type"

    def test_style_requires_style_tag_and_vice_versa(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(sub_type="style"))
        assert err.value.field == "style_tag"
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(sub_type="general", style_tag="sketch"))
        assert err.value.field == "style_tag"
        validate_record(make_record(sub_type="style", style_tag="sketch"))

    def test_camera_motion_requires_camera_tag(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(sub_type="camera_motion"))
        assert err.value.field == "camera_tag"
        validate_record(make_record(sub_type="camera_motion", camera_tag="pan left"))

    def test_zero_object_count_rejected(self):
        record = make_record(objects=({"name": "dog", "count": 0},))
        with pytest.raises(ValidationError) as err:
            validate_record(record)
        assert err.value.field == "objects"

    def test_color_outside_palette_rejected(self):
        record = make_record(objects=({"name": "dog", "color": "chartreuse"},))
        with pytest.raises(ValidationError) as err:
            validate_record(record)
        assert err.value.field == "objects"
        validate_record(make_record(objects=({"name": "dog", "color": "red"},)))

    def test_custom_palette_is_honored(self):
        record = make_record(objects=({"name": "dog", "color": "chartreuse"},))
        validate_record(record, color_palette=("chartreuse",))

    def test_empty_text_rejected(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(text="   "))
        assert err.value.field == "text"

    def test_blank_render_text_rejected(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(render_text=" "))
        assert err.value.field == "render_text"

    def test_amplitude_closed_set(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(amplitude="huge"))
        assert err.value.field == "amplitude"
        for amplitude in AMPLITUDES:
            validate_record(make_record(amplitude=amplitude))

    def test_action_label_must_be_in_vocabulary(self):
        with pytest.raises(ValidationError) as err:
            validate_record(make_record(action_label="levitating"))
        assert err.value.field == "action_label"
        validate_record(make_record(action_label="running"))
        validate_record(
            make_record(action_label="levitating"), action_vocabulary=("levitating",)
        )

    def test_duplicate_ids_rejected(self):
        record = make_record()
        with pytest.raises(ValidationError) as err:
            validate_benchmark(Benchmark(records=(record, record)))
        assert err.value.field == "id"
        assert err.value.record_id == record.id

    def test_empty_benchmark_rejected(self):
        with pytest.raises(ValidationError):
            validate_benchmark(Benchmark(records=()))


class TestPersistence:
    def test_round_trip_preserves_records(self, tmp_path):
        records = (
            make_record(),
            make_record(
                record_id="human-0042",
                text="a chef in watercolor style",
                meta_class="human",
                sub_type="style",
                style_tag="watercolor",
                objects=({"name": "dog", "count": 2, "color": "red"},),
                celebrity="famous_person_a",
                action_label="running",
                render_text="HELLO",
                amplitude="large",
            ),
        )
        path = tmp_path / "bench.jsonl"
        save_benchmark(Benchmark(records=records), path)
        loaded = load_benchmark(path)
        assert loaded.records == records

    def test_dict_round_trip_drops_null_keys(self):
        record = make_record()
        obj = record_to_dict(record)
        assert "style_tag" not in obj
        assert "celebrity" not in obj.get("attributes", {})
        assert record_from_dict(obj) == record

    def test_malformed_json_line_reports_position(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a-1"}\n{not json}\n', encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_benchmark(path)
        assert err.value.line == 2

    def test_invalid_record_rejected_on_load(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        record = record_to_dict(make_record(meta_class="animal"))
        record["meta_class"] = "robot"
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_benchmark(path)

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "bench.jsonl"
        body = json.dumps(record_to_dict(make_record()))
        path.write_text("\n" + body + "\n\n", encoding="utf-8")
        assert len(load_benchmark(path).records) == 1

    @given(
        meta_class=st.sampled_from(META_CLASSES),
        count=st.one_of(st.none(), st.integers(min_value=1, max_value=9)),
        color=st.one_of(st.none(), st.sampled_from(COLOR_PALETTE)),
        amplitude=st.one_of(st.none(), st.sampled_from(AMPLITUDES)),
    )
    @settings(max_examples=60, deadline=None)
    def test_any_valid_record_survives_dict_round_trip(self, meta_class, count, color, amplitude):
        record = make_record(
            record_id=f"{meta_class}-0001",
            meta_class=meta_class,
            objects=({"name": "dog", "count": count, "color": color},),
            amplitude=amplitude,
        )
        validate_record(record)
        assert record_from_dict(record_to_dict(record)) == record


class TestVocabularies:
    def test_action_vocabulary_has_everyday_entries(self):
        vocab = default_action_vocabulary()
        assert len(vocab) >= 20
        assert "running" in vocab

    def test_object_vocabulary_has_everyday_entries(self):
        vocab = default_object_vocabulary()
        for name in ("dog", "cat", "car", "bicycle"):
            assert name in vocab


class TestStats:
    def test_counts_partition_the_benchmark(self):
        records = (
            make_record("animal-0001"),
            make_record("animal-0002", text="two dogs"),
            make_record("human-0001", meta_class="human", sub_type="style", style_tag="sketch"),
        )
        stats = benchmark_stats(Benchmark(records=records))
        assert stats.total == 3
        assert sum(stats.meta_class_counts.values()) == 3
        assert sum(stats.sub_type_counts.values()) == 3
        assert sum(stats.word_histogram.values()) == 3
        assert stats.meta_class_counts == {"animal": 2, "human": 1}
        assert stats.sub_type_counts == {"general": 2, "style": 1}

    def test_mean_words_is_exact(self):
        records = (
            make_record("animal-0001", text="one two three four"),
            make_record("animal-0002", text="one two"),
        )
        stats = benchmark_stats(Benchmark(records=records))
        assert stats.mean_words == 3.0
        assert stats.word_histogram == {2: 1, 4: 1}

    def test_attribute_counts_track_presence(self):
        records = (
            make_record("animal-0001", objects=({"name": "dog", "count": 2},)),
            make_record("object-0001", meta_class="object", render_text="GO"),
            make_record("human-0001", meta_class="human", celebrity="famous_person_a"),
        )
        stats = benchmark_stats(Benchmark(records=records))
        assert stats.attribute_counts["objects"] == 1
        assert stats.attribute_counts["object_counts"] == 1
        assert stats.attribute_counts["render_text"] == 1
        assert stats.attribute_counts["celebrity"] == 1
        assert "object_colors" not in stats.attribute_counts

    def test_word_count_splits_on_whitespace(self):
        assert word_count("a  red   dog") == 3


class TestShippedBenchmark:
    def test_loads_validates_and_matches_design_targets(self):
        benchmark = load_benchmark(builtin_benchmark_path())
        assert len(benchmark.records) >= 500
        stats = benchmark_stats(benchmark)
        assert abs(stats.mean_words - 12.5) <= 2.0
        assert set(stats.meta_class_counts) == set(META_CLASSES)
        assert set(stats.sub_type_counts) == set(SUB_TYPES)
        assert sum(stats.meta_class_counts.values()) == stats.total

    def test_shipped_ids_are_unique_and_nonempty(self):
        benchmark = load_benchmark(builtin_benchmark_path())
        ids = [record.id for record in benchmark.records]
        assert all(ids)
        assert len(set(ids)) == len(ids)
