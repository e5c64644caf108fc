import io

from minsumkd.file_readers import read_llr_frames
from minsumkd.file_readers import read_text


def _read(text, n=3):
    return list(read_llr_frames(io.StringIO(text), n))


def test_reads_one_frame_per_line():
    lines = _read("1.5 -2 0.25\n-1 -1 -1\n")
    assert [line.llr.tolist() for line in lines] == [[1.5, -2.0, 0.25], [-1.0, -1.0, -1.0]]
    assert [line.line_number for line in lines] == [1, 2]


def test_skips_blank_and_comment_lines():
    lines = _read("# frame file\n\n1 2 3\n")
    assert len(lines) == 1
    assert lines[0].line_number == 3


def test_accepts_commas():
    assert _read("1,2, 3\n")[0].llr.tolist() == [1.0, 2.0, 3.0]


def test_wrong_count_is_reported_not_raised():
    lines = _read("1 2\n1 2 3\n")
    assert not lines[0].ok
    assert "expected 3 values, got 2" in lines[0].error
    assert lines[1].ok


def test_non_numeric_value_is_reported():
    line = _read("1 x 3\n")[0]
    assert not line.ok
    assert line.llr is None


def test_non_finite_value_is_reported():
    assert _read("1 inf 3\n")[0].error == "LLRs must be finite"


def test_read_text_decodes_utf16(tmp_path):
    path = tmp_path / "frames.txt"
    path.write_bytes("1 2 3\n".encode("utf-16"))
    assert read_text(str(path)) == "1 2 3\n"


def test_read_text_reads_empty_file(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_bytes(b"")
    assert read_text(str(path)) == ""
