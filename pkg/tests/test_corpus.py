import pytest

from dialectid.corpus import (
    DEFAULT_COUNTRIES,
    ColumnSchema,
    LabelVocab,
    Level,
    Register,
    Subtask,
    TweetRecord,
    concat_splits,
    corpus_stats,
    load_corpus,
    read_submission,
    write_corpus,
    write_submission,
)
from dialectid.errors import (
    DuplicateId,
    HierarchyViolation,
    LengthMismatch,
    MalformedRow,
    UnknownLabel,
    UnlabeledRecord,
)


def test_subtask_codes():
    assert Subtask(Level.COUNTRY, Register.MSA).code == "1.1"
    assert Subtask(Level.COUNTRY, Register.DA).code == "1.2"
    assert Subtask(Level.PROVINCE, Register.MSA).code == "2.1"
    assert Subtask(Level.PROVINCE, Register.DA).code == "2.2"


def test_record_label_by_level():
    r = TweetRecord(id="1", text="نص", country="Egypt", province="Cairo")
    assert r.label(Level.COUNTRY) == "Egypt"
    assert r.label(Level.PROVINCE) == "Cairo"
    assert TweetRecord(id="2", text="x").label(Level.COUNTRY) is None


def test_default_country_inventory():
    assert len(DEFAULT_COUNTRIES) == 21
    assert "Saudi_Arabia" in DEFAULT_COUNTRIES
    assert "UAE" in DEFAULT_COUNTRIES
    assert len(set(DEFAULT_COUNTRIES)) == 21


class TestLabelVocab:
    def test_countries_only(self):
        vocab = LabelVocab.countries_only()
        assert vocab.countries == DEFAULT_COUNTRIES
        assert vocab.provinces == ()
        assert vocab.labels(Level.COUNTRY) == DEFAULT_COUNTRIES

    def test_from_file_preserves_first_appearance_order(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text(
            "Cairo\tEgypt\nAlexandria\tEgypt\nBaghdad\tIraq\n", encoding="utf-8"
        )
        vocab = LabelVocab.from_file(str(path))
        assert vocab.provinces == ("Cairo", "Alexandria", "Baghdad")
        assert vocab.countries == ("Egypt", "Iraq")
        assert vocab.province_to_country["Alexandria"] == "Egypt"
        assert vocab.labels(Level.PROVINCE) == ("Cairo", "Alexandria", "Baghdad")

    def test_from_file_rejects_duplicate_province(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("Cairo\tEgypt\nCairo\tEgypt\n", encoding="utf-8")
        with pytest.raises(DuplicateId, match="2"):
            LabelVocab.from_file(str(path))

    def test_from_file_rejects_wrong_column_count(self, tmp_path):
        path = tmp_path / "vocab.tsv"
        path.write_text("Cairo\n", encoding="utf-8")
        with pytest.raises(MalformedRow, match="1"):
            LabelVocab.from_file(str(path))

    def test_validation(self):
        with pytest.raises(ValueError):
            LabelVocab(countries=("Egypt", "Egypt"))
        with pytest.raises(ValueError):
            LabelVocab(countries=("Egypt",), provinces=("Cairo",))
        with pytest.raises(ValueError):
            LabelVocab(
                countries=("Egypt",),
                provinces=("Baghdad",),
                province_to_country={"Baghdad": "Iraq"},
            )


VOCAB = LabelVocab(
    countries=("Egypt", "Iraq"),
    provinces=("Cairo", "Baghdad"),
    province_to_country={"Cairo": "Egypt", "Baghdad": "Iraq"},
)


class TestLoadCorpus:
    def test_round_trip_with_header(self, tmp_path):
        records = [
            TweetRecord(id="a", text="نص اول", country="Egypt", province="Cairo"),
            TweetRecord(id="b", text="نص ثان", country="Iraq", province=None),
            TweetRecord(id="c", text="bla", country=None, province=None),
        ]
        path = tmp_path / "split.tsv"
        write_corpus(records, str(path))
        loaded = load_corpus(str(path), Register.DA)
        assert loaded == records

    def test_headerless_two_columns(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\nb\tآخر\n", encoding="utf-8")
        loaded = load_corpus(str(path), Register.MSA)
        assert [r.id for r in loaded] == ["a", "b"]
        assert loaded[0].country is None
        assert loaded[0].register is Register.MSA

    def test_headerless_three_columns(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\tEgypt\n", encoding="utf-8")
        loaded = load_corpus(str(path), Register.DA)
        assert loaded[0].country == "Egypt"
        assert loaded[0].province is None

    def test_headerless_four_columns(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\tEgypt\tCairo\n", encoding="utf-8")
        loaded = load_corpus(str(path), Register.DA)
        assert loaded[0].province == "Cairo"

    def test_header_with_reordered_label_columns(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text(
            "id\ttweet\tprovince\tcountry\na\tنص\tCairo\tEgypt\n", encoding="utf-8"
        )
        loaded = load_corpus(str(path), Register.DA)
        assert loaded[0].country == "Egypt"
        assert loaded[0].province == "Cairo"

    def test_custom_schema_names(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("tid\tcontent\nx\tنص\n", encoding="utf-8")
        schema = ColumnSchema(id="tid", text="content")
        loaded = load_corpus(str(path), Register.DA, schema=schema)
        assert loaded[0].id == "x"
        assert loaded[0].text == "نص"

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.tsv"
        path.write_text("", encoding="utf-8")
        assert load_corpus(str(path), Register.DA) == []

    def test_crlf_lines(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_bytes(b"a\t\xd9\x86\xd8\xb5\r\nb\tx\r\n")
        loaded = load_corpus(str(path), Register.DA)
        assert [r.text for r in loaded] == ["نص", "x"]

    def test_inconsistent_columns_reports_line(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\nb\tx\tEgypt\n", encoding="utf-8")
        with pytest.raises(MalformedRow, match=r":2:"):
            load_corpus(str(path), Register.DA)

    def test_too_many_columns(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tb\tc\td\te\n", encoding="utf-8")
        with pytest.raises(MalformedRow, match=r":1:"):
            load_corpus(str(path), Register.DA)

    def test_duplicate_id_reports_line(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tx\na\ty\n", encoding="utf-8")
        with pytest.raises(DuplicateId, match=r":2:"):
            load_corpus(str(path), Register.DA)

    def test_empty_id_rejected(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("\tx\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_corpus(str(path), Register.DA)

    def test_empty_label_cells_become_none(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\t\t\n", encoding="utf-8")
        loaded = load_corpus(str(path), Register.DA)
        assert loaded[0].country is None
        assert loaded[0].province is None

    def test_unknown_country_with_vocab(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\tAtlantis\n", encoding="utf-8")
        with pytest.raises(UnknownLabel, match="Atlantis"):
            load_corpus(str(path), Register.DA, vocab=VOCAB)

    def test_unknown_province_with_vocab(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\tEgypt\tNowhere\n", encoding="utf-8")
        with pytest.raises(UnknownLabel, match="Nowhere"):
            load_corpus(str(path), Register.DA, vocab=VOCAB)

    def test_province_country_mismatch(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\tIraq\tCairo\n", encoding="utf-8")
        with pytest.raises(HierarchyViolation):
            load_corpus(str(path), Register.DA, vocab=VOCAB)

    def test_province_without_country(self, tmp_path):
        path = tmp_path / "split.tsv"
        path.write_text("a\tنص\t\tCairo\n", encoding="utf-8")
        with pytest.raises(HierarchyViolation):
            load_corpus(str(path), Register.DA, vocab=VOCAB)
        with pytest.raises(HierarchyViolation):
            load_corpus(str(path), Register.DA)


def test_write_corpus_rejects_tabs_and_newlines(tmp_path):
    path = tmp_path / "out.tsv"
    with pytest.raises(MalformedRow):
        write_corpus([TweetRecord(id="a", text="x\ty")], str(path))
    with pytest.raises(MalformedRow):
        write_corpus([TweetRecord(id="a", text="x\ny")], str(path))


class TestStats:
    def records(self):
        return [
            TweetRecord(id="1", text="x", country="Egypt", province="Cairo"),
            TweetRecord(id="2", text="y", country="Egypt", province="Cairo"),
            TweetRecord(id="3", text="z", country="Iraq", province="Baghdad"),
        ]

    def test_counts_without_vocab_follow_first_appearance(self):
        stats = corpus_stats(self.records(), Level.COUNTRY)
        assert list(stats.counts.items()) == [("Egypt", 2), ("Iraq", 1)]
        assert stats.total == 3

    def test_counts_with_vocab_include_zeros_in_vocab_order(self):
        vocab = LabelVocab(countries=("Iraq", "Egypt", "Jordan"))
        stats = corpus_stats(self.records(), Level.COUNTRY, vocab=vocab)
        assert list(stats.counts.items()) == [("Iraq", 1), ("Egypt", 2), ("Jordan", 0)]

    def test_province_level(self):
        stats = corpus_stats(self.records(), Level.PROVINCE, vocab=VOCAB)
        assert stats.counts == {"Cairo": 2, "Baghdad": 1}

    def test_unlabeled_record_raises(self):
        records = [TweetRecord(id="1", text="x")]
        with pytest.raises(UnlabeledRecord):
            corpus_stats(records, Level.COUNTRY)

    def test_label_outside_vocab_raises(self):
        records = [TweetRecord(id="1", text="x", country="Atlantis")]
        vocab = LabelVocab(countries=("Egypt",))
        with pytest.raises(UnknownLabel):
            corpus_stats(records, Level.COUNTRY, vocab=vocab)


def test_concat_splits():
    train = [TweetRecord(id="1", text="a"), TweetRecord(id="2", text="b")]
    dev = [TweetRecord(id="3", text="c")]
    merged = concat_splits(train, dev)
    assert [r.id for r in merged] == ["1", "2", "3"]
    with pytest.raises(DuplicateId):
        concat_splits(train, [TweetRecord(id="2", text="dup")])


class TestSubmission:
    def test_round_trip_and_trailing_newline(self, tmp_path):
        path = tmp_path / "sub.csv"
        write_submission(["a", "b"], ["Egypt", "Iraq"], str(path))
        raw = path.read_bytes()
        assert raw == b"a,Egypt\nb,Iraq\n"
        assert read_submission(str(path)) == [("a", "Egypt"), ("b", "Iraq")]

    def test_empty_submission_is_empty_file(self, tmp_path):
        path = tmp_path / "sub.csv"
        write_submission([], [], str(path))
        assert path.read_bytes() == b""
        assert read_submission(str(path)) == []

    def test_length_mismatch(self, tmp_path):
        with pytest.raises(LengthMismatch):
            write_submission(["a"], [], str(tmp_path / "sub.csv"))

    def test_read_rejects_missing_comma(self, tmp_path):
        path = tmp_path / "sub.csv"
        path.write_text("justonefield\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            read_submission(str(path))
