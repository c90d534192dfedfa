import pytest
from hypothesis import given, strategies as st

from koszulrank.certificate import Certificate, parse_int, read_certificate, render_int, write_certificate
from koszulrank.errors import InvalidArgument


def test_render_examples():
    assert render_int(2**32) == "2^32"
    assert render_int(-2**20 * 3**4) == "-2^20*3^4"
    assert render_int(2**1600 * 3**25) == "2^1600*3^25"
    assert render_int(0) == "0" and render_int(-1) == "-1" and render_int(997) == "997"
    assert render_int(1009 * 2) == "2018"


@given(st.integers(min_value=-10**30, max_value=10**30))
def test_render_parse_round_trip(v):
    assert parse_int(render_int(v)) == v


def test_certificate_text_round_trip():
    c = Certificate("det-lower-n4", "PROVED", {"input.n": 4, "fact.det": 2**32, "fact.size": [96, 96],
                                               "fact.full_rank": True, "claim": "border rank of det_4 >= 11"})
    text = c.dumps()
    assert "fact.det = 2^32" in text and "fact.size = [96 96]" in text and "input.n = 4" in text
    back = Certificate.loads(text)
    assert back.facts() == c.facts() and back.verdict == "PROVED" and back.tag == c.tag


def test_bad_certificates():
    with pytest.raises(InvalidArgument):
        Certificate("x", "MAYBE")
    with pytest.raises(InvalidArgument):
        Certificate.loads("verdict = PROVED\n")
    with pytest.raises(InvalidArgument):
        Certificate.loads("tag = x\nverdict = PROVED\nnonsense\n")


def test_store_is_append_only(tmp_path, monkeypatch):
    c = Certificate("t", "FAILED", {"fact.rank": 3})
    paths = {write_certificate(c, tmp_path) for _ in range(3)}
    assert len(paths) == 3
    first = sorted(paths)[0]
    before = first.read_text()
    write_certificate(Certificate("t", "PROVED"), tmp_path)
    assert first.read_text() == before
    assert read_certificate(first).verdict == "FAILED"
    monkeypatch.setenv("KOSZULRANK_OUT_DIR", str(tmp_path / "env"))
    assert write_certificate(c).parent == tmp_path / "env"
