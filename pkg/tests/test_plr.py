import pytest

from latinlab import PartialLatinRectangle, format_plr, parse_plr, parse_plr_blocks
from latinlab.errors import PlrParseError


def test_roundtrip_complete(rect24):
    text = format_plr(rect24.as_partial())
    assert text.endswith("\n")
    back = parse_plr(text)
    assert back.to_grid() == rect24.to_grid()


def test_roundtrip_partial():
    p = PartialLatinRectangle.from_entries(3, 5, [(1, 1, 1), (2, 4, 3), (3, 5, 2)])
    assert parse_plr(format_plr(p)) == p


def test_dots_and_comments():
    text = "# header comment\n2 3\n1 . 2\n# interior comment\n. 3 .\n"
    p = parse_plr(text)
    assert p.k == 2 and p.n == 3
    assert p.symbol_at(1, 1) == 1
    assert p.symbol_at(1, 2) == 0
    assert p.symbol_at(2, 2) == 3


def test_blocks():
    a = PartialLatinRectangle.from_entries(2, 3, [(1, 1, 1)])
    b = PartialLatinRectangle.from_entries(1, 4, [(1, 2, 2)])
    text = format_plr(a) + "\n" + format_plr(b)
    blocks = parse_plr_blocks(text)
    assert blocks == [a, b]
    assert parse_plr_blocks("") == []


def test_bad_header():
    with pytest.raises(PlrParseError):
        parse_plr("2\n1 2\n2 1\n")
    with pytest.raises(PlrParseError):
        parse_plr("x 3\n1 2 3\n")
    with pytest.raises(PlrParseError):
        parse_plr("0 3\n")


def test_wrong_cell_count_reports_position():
    with pytest.raises(PlrParseError) as e:
        parse_plr("2 4\n1 2 3\n2 1 4 3\n")
    assert e.value.line == 2


def test_bad_token_reports_position():
    with pytest.raises(PlrParseError) as e:
        parse_plr("1 3\n1 ? 3\n")
    assert e.value.line == 2
    assert e.value.column == 3


def test_missing_and_extra_rows():
    with pytest.raises(PlrParseError):
        parse_plr("3 3\n1 2 3\n2 3 1\n")
    with pytest.raises(PlrParseError):
        parse_plr("1 3\n1 2 3\n2 3 1\n")


def test_invalid_grid_is_validation_not_parse():
    # the parser hands off Latin-constraint checking to the data types
    from latinlab.errors import ValidationError

    with pytest.raises(ValidationError):
        parse_plr("1 3\n1 1 3\n")


def test_value_out_of_range():
    from latinlab.errors import ValidationError

    with pytest.raises(ValidationError):
        parse_plr("1 3\n1 2 4\n")
