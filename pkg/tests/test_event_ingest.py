import io

import pytest

from gdelt_arima.errors import IngestError
from gdelt_arima.event_ingest import (
    DateFormat,
    EventRecord,
    EventSchema,
    IngestStats,
    Skip,
    SkipReason,
    ingest,
    iter_records,
    parse_delimiter,
    parse_record,
)
from gdelt_arima.synthetic import event_lines

from conftest import tally

DEFAULT = EventSchema()


def test_parse_basic_row():
    assert parse_record("20130115\tUS\tCH", DEFAULT) == EventRecord(2013, "US", "CH")


def test_parse_ignores_extra_columns_and_newline():
    rec = parse_record("20130115\tUS\tCH\t042\tUS\t-1.5\thttp://x\r\n", DEFAULT)
    assert rec == EventRecord(2013, "US", "CH")


def test_parse_empty_actor():
    assert parse_record("20130115\t\tCH", DEFAULT) == Skip(SkipReason.EMPTY_ACTOR)


def test_parse_year_only_format():
    schema = EventSchema(date_format=DateFormat.YYYY)
    assert parse_record("1979\tJA\tCH", schema) == EventRecord(1979, "JA", "CH")


@pytest.mark.parametrize(
    "line, reason",
    [
        ("20130115\tUS", SkipReason.MISSING_COLUMN),
        ("20131315\tUS\tCH", SkipReason.BAD_DATE),
        ("2013-01-15\tUS\tCH", SkipReason.BAD_DATE),
        ("19700101\tUS\tCH", SkipReason.BAD_DATE),
        ("20130115\tUSA\tCH", SkipReason.MALFORMED_CODE),
        ("20130115\tU1\tCH", SkipReason.MALFORMED_CODE),
        ("", SkipReason.MISSING_COLUMN),
    ],
)
def test_parse_skips(line, reason):
    result = parse_record(line, DEFAULT)
    assert isinstance(result, Skip) and result.reason is reason


def test_three_letter_codes_and_custom_columns():
    schema = EventSchema(
        date_column=2, actor1_country_column=0, actor2_country_column=4,
        delimiter=",", country_code_length=3,
    )
    assert parse_record("usa,x,20010203,y,chn", schema) == EventRecord(2001, "USA", "CHN")


def test_schema_validation():
    with pytest.raises(ValueError):
        EventSchema(actor1_country_column=0)
    with pytest.raises(ValueError):
        EventSchema(delimiter="::")
    with pytest.raises(ValueError):
        EventSchema(min_year=2020, max_year=2000)


def test_schema_from_config():
    text = "# GDELT 1.0 layout\ndate_column = 1\nactor1_country_column=7\nactor2_country_column=17\n" \
           "delimiter=tab\ncountry_code_length=3\n"
    schema = EventSchema.from_config(text, max_year=2014)
    assert (schema.date_column, schema.actor1_country_column, schema.actor2_country_column) == (1, 7, 17)
    assert schema.delimiter == "\t" and schema.country_code_length == 3 and schema.max_year == 2014
    with pytest.raises(ValueError):
        EventSchema.from_config("colour=blue")
    with pytest.raises(ValueError):
        EventSchema.from_config("date_column")


def test_parse_delimiter_names():
    assert parse_delimiter("\\t") == "\t"
    assert parse_delimiter("comma") == ","
    assert parse_delimiter(";") == ";"
    with pytest.raises(ValueError):
        parse_delimiter("ab")


def test_ingest_filters_non_target_rows():
    rows = ["20130101\tUS\tCH", "20130101\tCH\tJA", "20130101\tCH\tCH", "20130101\tUS\tJA"]
    records, stats = ingest(rows, DEFAULT, "CH")
    assert records == [EventRecord(2013, "US", "CH"), EventRecord(2013, "CH", "JA")]
    assert stats.rows_filtered_no_target == 2
    assert stats.rows_read == 4 and stats.rows_emitted == 2


def test_ingest_empty():
    records, stats = ingest([], DEFAULT, "CH")
    assert records == [] and stats == IngestStats()


def test_ingest_counts_synthetic_fixture():
    # 400 CH dyads with a distinct partner, 600 rows that must not be emitted.
    lines = [f"2001010{1 + i % 9}\t{'CH' if i % 2 else 'US'}\t{'JA' if i % 2 else 'CH'}" for i in range(400)]
    lines += [f"20010101\tUS\tJA" for _ in range(200)]
    lines += [f"20010101\tCH\tCH" for _ in range(200)]
    lines += [f"20010101\t\tCH" for _ in range(100)]
    lines += [f"2001XX01\tUS\tCH" for _ in range(100)]
    order = list(range(len(lines)))
    import random

    random.Random(7).shuffle(order)
    lines = [lines[i] for i in order]
    independent = sum(sum(row.values()) for row in tally(lines, "CH").values())
    records, stats = ingest(lines, DEFAULT, "CH")
    assert independent == 400
    assert len(records) == 400
    assert stats.rows_read == 1000
    assert stats.rows_skipped_malformed == 200
    assert stats.rows_filtered_no_target == 400


def test_emitted_records_pair_target_with_distinct_partner():
    records, _ = ingest(event_lines(2000, seed=3), DEFAULT, "CH")
    assert records
    for r in records:
        assert (r.actor1 == "CH") != (r.actor2 == "CH")


def test_ingest_is_deterministic():
    text = "\n".join(event_lines(1500, seed=9))
    a = ingest(io.StringIO(text), DEFAULT, "CH")
    b = ingest(io.StringIO(text), DEFAULT, "CH")
    assert a == b


@pytest.mark.parametrize("text, n", [("", 0), ("a", 1), ("a\nb", 2), ("a\nb\n", 2), ("\n\n", 2)])
def test_rows_read_matches_line_count(text, n):
    _, stats = ingest(io.StringIO(text), DEFAULT, "CH")
    assert stats.rows_read == n


def test_target_is_normalised_and_checked():
    records, _ = ingest(["20130101\tus\tch"], DEFAULT, " ch ")
    assert records == [EventRecord(2013, "US", "CH")]
    with pytest.raises(ValueError):
        ingest([], DEFAULT, "CHINA")


def test_read_failure_becomes_ingest_error():
    def lines():
        yield "20130101\tUS\tCH"
        raise OSError("disk went away")

    stats = IngestStats()
    with pytest.raises(IngestError) as info:
        list(iter_records(lines(), DEFAULT, "CH", stats))
    assert info.value.stats.rows_read == 1


def test_undecodable_file(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_bytes(b"20130101\tUS\tCH\n\xff\xfe\x00junk\n")
    with open(path, encoding="utf-8") as fh, pytest.raises(IngestError):
        ingest(fh, DEFAULT, "CH")


def test_skip_reasons_are_tallied():
    rows = ["20130101\t\tCH", "bad", "20130101\tUSA\tCH", "20130101\tUS\tCH"]
    _, stats = ingest(rows, DEFAULT, "CH")
    assert stats.skip_reasons == {"empty-actor": 1, "missing-column": 1, "malformed-code": 1}
    assert "rows_read=4" in stats.summary()
