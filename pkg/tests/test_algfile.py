import pytest

from nilcsat.algebra import build_example
from nilcsat.algfile import format_algebra, load_algebra, parse_algebra, save_algebra
from nilcsat.errors import FormatError

A22_TEXT = """\
ALGEBRA v1
q 2
alphas 1 1
op + 2 builtin-sum
op p1 2 structured
  level 1 linear [[0]] [[0]] tail poly x2*y2
  level 2 linear [[0]] [[0]] tail const 0
END
"""


def same_tables(a, b):
    assert a.q == b.q and a.alphas == b.alphas
    assert a.arities == b.arities
    for name in a.arities:
        assert a.op_table(name).tolist() == b.op_table(name).tolist()


def test_parses_the_documented_example(a22):
    same_tables(parse_algebra(A22_TEXT), a22)


@pytest.mark.parametrize("q,h,m", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (5, 2, 2)])
def test_round_trip_examples(q, h, m, tmp_path):
    alg = build_example(q, h, m)
    text = format_algebra(alg)
    same_tables(parse_algebra(text), alg)
    path = tmp_path / "a.alg"
    save_algebra(alg, path)
    same_tables(load_algebra(path), alg)
    assert format_algebra(load_algebra(path)) == text


def test_table_operations_round_trip(a22):
    rows = []
    for x in a22.elements():
        out = a22.eval_op("p1", [x, x])
        rows.append(f"  {a22.format_element(x)} -> {a22.format_element(out)}")
    text = "ALGEBRA v1\nq 2\nalphas 1 1\nop + 2 builtin-sum\nop sq 1 table\n" + "\n".join(rows) + "\nEND\n"
    alg = parse_algebra(text)
    assert alg.eval_op("sq", [(0, 1)]) == (1, 0)
    same_tables(parse_algebra(format_algebra(alg)), alg)


def test_tail_table_and_comments():
    text = """\
# two levels over F_3
ALGEBRA v1
q 3
alphas 1 1
op + 2 builtin-sum
op s 1 structured
  level 1 linear [[1]] tail table   # identity plus the square of the bottom
    0 -> 0
    1 -> 1
    2 -> 1
  level 2 linear [[2]]
END
"""
    alg = parse_algebra(text)
    assert alg.eval_op("s", [(1, 2)]) == (2, 1)
    assert alg.eval_op("s", [(0, 1)]) == (1, 2)


def error_line(text):
    with pytest.raises(FormatError) as info:
        parse_algebra(text)
    return info.value.line, str(info.value)


def test_errors_carry_line_numbers():
    assert error_line("ALGEBRA v2\n")[0] == 1
    assert error_line("ALGEBRA v1\nq two\n")[0] == 2
    assert error_line(A22_TEXT.replace("op p1 2 structured", "op p1 2 fancy"))[0] == 5
    line, msg = error_line(A22_TEXT.replace("[[0]] [[0]] tail poly x2*y2", "[[0]] tail poly x2*y2"))
    assert line == 6 and "2 linear matrices" in msg
    line, msg = error_line(A22_TEXT.replace("tail poly x2*y2", "tail poly x1*y2"))
    assert line == 6 and "level 1 tails may only read coordinates [2]" in msg
    assert error_line(A22_TEXT.replace("END\n", "END\nop q 1 table\n"))[0] == 9


def test_missing_levels_and_truncation():
    text = A22_TEXT.replace("  level 2 linear [[0]] [[0]] tail const 0\n", "")
    line, msg = error_line(text)
    assert line == 5 and "missing levels [2]" in msg
    with pytest.raises(FormatError):
        parse_algebra(A22_TEXT.replace("END\n", ""))


def test_non_triangular_file_is_rejected():
    text = A22_TEXT.replace("[[0]] [[0]] tail const 0", "[[0]] [[0]] tail const 1").replace(
        "op + 2 builtin-sum\n", ""
    )
    with pytest.raises(FormatError):
        parse_algebra(text)


def test_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_algebra(tmp_path / "nope.alg")
