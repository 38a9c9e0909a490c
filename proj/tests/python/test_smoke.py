# casefile - offline artifact analysis workbench

import hashlib
import io
import math
import zipfile
import zlib

import pytest

import casefile


def test_version():
    assert casefile.__version__ == "0.1.0"


def test_identify_zip_and_text():
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as z:
        z.writestr("a.txt", "hello")
    assert casefile.identify(buf.getvalue(), "a.zip")["tag"] == "ZIP"
    assert casefile.identify(b'{"k": [1, 2]}', "x")["tag"] == "JSON"


def test_hash_matches_hashlib():
    data = bytes(range(256)) * 3
    values = casefile.hash(data)
    assert values["sha256"] == hashlib.sha256(data).hexdigest()
    assert values["md5"] == hashlib.md5(data).hexdigest()
    assert values["sha1"] == hashlib.sha1(data).hexdigest()
    assert int(values["crc32"], 16) == zlib.crc32(data)


def test_entropy():
    overall, blocks = casefile.entropy(bytes(range(256)), 64)
    assert math.isclose(overall, 8.0)
    assert len(blocks) == 4


def test_strings_and_artifacts():
    data = b"\x00\x01http://example.com/payload.exe\x00\x02"
    assert casefile.strings(data) == [(2, "ascii", "http://example.com/payload.exe")]
    arts = casefile.artifacts(data)
    assert arts[0]["kind"] == "Url"
    assert arts[0]["offset"] == 2


def test_deobfuscate():
    text, steps, truncated = casefile.deobfuscate('var a = "ab" + "cd"; // x\n')
    assert '"abcd"' in text
    assert "//" not in text
    assert not truncated
    assert {s[1] for s in steps} >= {"remove_comments", "fold_concatenations"}


def test_disassemble():
    listing = casefile.disassemble(b"\x55\x89\xe5\xc3", 32, 0x1000)
    assert listing == [(0x1000, "push ebp"), (0x1001, "mov ebp,esp"), (0x1003, "ret")]


def test_compare():
    assert casefile.compare(b"abc", b"abc") == []
    assert casefile.compare(b"abc", b"axc")[0][:3] == (1, 1, 1)


def test_analyze_expands_archive():
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as z:
        z.writestr("inner.txt", "some text content " * 10)
    report = casefile.analyze(buf.getvalue(), "a.zip", deep=True)
    tags = [n["tag"] for n in report["nodes"]]
    assert tags[0] == "ZIP"
    assert len(tags) == 2


def test_errors_are_raised():
    with pytest.raises(casefile.Error):
        casefile.hash(b"", ["sha3"])
    with pytest.raises(ValueError):
        casefile.entropy(b"abc", 0)
