"""
Tests for sequence file parsing and writing

Covers:
- parse_value on integers, p/q rationals and decimals
- CSV parsing: BOM, comments, blank lines, malformed rows
- JSON parsing with generator tags
- read_sequence by suffix and the writers
"""

import json
from fractions import Fraction

import pytest

from noerlund.errors import ParseError
from noerlund.services.operator_core import shift_norms_closed_form
from noerlund.services.seq_calculus import cesaro_numbers
from noerlund.services.sequence_io import (
    format_value,
    parse_sequence_csv,
    parse_sequence_json,
    parse_value,
    read_sequence,
    rehydrate,
    sequence_payload,
    sequence_to_csv,
    sequence_to_json,
)


class TestParseValue:
    """Test suite for parse_value"""

    @pytest.mark.parametrize(
        "raw, expected",
        [
            ("42", 42),
            ("-7", -7),
            ("+3", 3),
            ("3/4", Fraction(3, 4)),
            ("-10 / 4", Fraction(-5, 2)),
            ("2.5", 2.5),
            ("1e-3", 0.001),
            ("inf", float("inf")),
        ],
    )
    def test_values(self, raw, expected):
        """Should keep integers and rationals exact and parse the rest as floats"""
        value = parse_value(raw, 1)

        assert value == expected
        assert type(value) is type(expected)

    def test_rejects_garbage(self):
        with pytest.raises(ParseError, match="line 4"):
            parse_value("abc", 4)

    def test_rejects_zero_denominator_and_nan(self):
        with pytest.raises(ParseError, match="zero denominator"):
            parse_value("1/0", 1)
        with pytest.raises(ParseError, match="NaN"):
            parse_value("nan", 1)


class TestParseCsv:
    """Test suite for parse_sequence_csv"""

    def test_exact_file_with_comments(self):
        """Should skip comments and blank lines and stay exact"""
        parsed = parse_sequence_csv("\ufeff# weights\n1\n\n3/2\r\n2\n# end\n")

        assert parsed.sequence.exact
        assert parsed.sequence.to_list() == [1, Fraction(3, 2), 2]
        assert parsed.comments == ["weights", "end"]

    def test_mixed_file_is_float(self):
        parsed = parse_sequence_csv("1\n0.5\n")

        assert not parsed.sequence.exact
        assert parsed.sequence.to_list() == [1.0, 0.5]

    def test_tag_is_kept(self):
        assert parse_sequence_csv("1\n", tag="weights").sequence.tag == "weights"

    def test_malformed_row_names_the_line(self):
        """Should report the physical line of a two-column row"""
        with pytest.raises(ParseError) as excinfo:
            parse_sequence_csv("1\n# note\n1,2\n")

        assert excinfo.value.line == 3
        assert "line 3" in str(excinfo.value)

    def test_empty_file(self):
        with pytest.raises(ParseError, match="no sequence values"):
            parse_sequence_csv("# nothing here\n\n")


class TestParseJson:
    """Test suite for parse_sequence_json and rehydrate"""

    def test_bare_array(self):
        seq = parse_sequence_json('[1, "1/3", 2]')

        assert seq.exact
        assert seq.to_list() == [1, Fraction(1, 3), 2]
        assert seq.generator is None

    def test_cesaro_generator_is_reattached(self):
        """Should continue a tagged Cesàro prefix beyond its horizon"""
        reference = cesaro_numbers(Fraction(1, 2), 40).values
        content = json.dumps({"values": sequence_payload(reference.truncate(10))["values"], "generator": "cesaro:1/2"})

        seq = parse_sequence_json(content)

        assert seq.exact
        assert seq.tag == "cesaro:1/2"
        assert seq[40] == reference[40]

    def test_float_cesaro_tag(self):
        values = cesaro_numbers(0.5, 12).values.to_list()
        seq = rehydrate(values, "cesaro:0.5")

        assert seq[30] == pytest.approx(cesaro_numbers(0.5, 30).values[30], rel=1e-12)

    def test_shift_generator_is_reattached(self):
        values = shift_norms_closed_form(10).to_list()
        seq = parse_sequence_json(json.dumps({"values": values, "generator": "weighted-shift"}))

        assert seq[20] == pytest.approx(shift_norms_closed_form(20)[20], rel=1e-12)

    def test_generator_mismatch(self):
        """Should refuse values that contradict the named generator"""
        content = json.dumps({"values": ["1/1", "1/2", "3/8"], "generator": "cesaro:1/2"})

        with pytest.raises(ParseError, match="generator disagrees"):
            parse_sequence_json(content)

    def test_unknown_tag_is_only_a_label(self):
        seq = rehydrate([1, 2, 3], "from-somewhere")

        assert seq.tag == "from-somewhere"
        assert seq.generator is None

    @pytest.mark.parametrize(
        "content",
        ["[true, 1]", "[]", '{"values": 3}', "[[1]]", "{not json"],
    )
    def test_rejects_bad_payloads(self, content):
        with pytest.raises(ParseError):
            parse_sequence_json(content)


class TestFiles:
    """Test suite for read_sequence and the writers"""

    def test_read_by_suffix(self, write_file):
        """Should pick JSON or CSV from the file suffix"""
        json_seq = read_sequence(write_file("a.json", '{"values": [1, 2]}'))
        csv_seq = read_sequence(write_file("weights.csv", "1\n2\n"))

        assert json_seq.to_list() == [1, 2]
        assert csv_seq.to_list() == [1, 2]
        assert csv_seq.tag == "weights"

    def test_format_value(self):
        assert format_value(Fraction(0)) == "0/1"
        assert format_value(Fraction(-3, 4)) == "-3/4"
        assert format_value(2.5) == 2.5

    def test_writers(self):
        """Should write exact values as p/q and floats as numbers"""
        exact = cesaro_numbers(1, 3).values

        assert sequence_to_csv(exact) == "1/1\n2/1\n3/1\n4/1\n"
        assert json.loads(sequence_to_json(exact)) == {
            "values": ["1/1", "2/1", "3/1", "4/1"],
            "generator": "cesaro:1",
        }
        assert sequence_to_csv(cesaro_numbers(0.5, 1).values) == "1.0\n1.5\n"

    def test_written_json_reads_back(self, write_file):
        original = cesaro_numbers(Fraction(3, 2), 20).values
        seq = read_sequence(write_file("c.json", sequence_to_json(original)))

        assert seq.to_list() == original.to_list()
        assert seq[25] == cesaro_numbers(Fraction(3, 2), 25).values[25]
