"""Cover validation, shrinking, and certificate files."""

import pytest

from scaledim import (Certificate, ScaledCover, format_certificate, interval,
                      parse_certificate, read_certificate, shrink_to_partition,
                      validate_cover, write_certificate)


def path4():
    return interval(3, 1)  # points 0,1,2,3 in a line


def test_valid_cover_passes():
    cover = ScaledCover.of(1, 2, [[[0, 1, 2]], [[3]]])
    report = validate_cover(path4(), cover)
    assert report.ok
    assert report.describe() == "valid cover"


def test_uncovered_point_reported():
    cover = ScaledCover.of(1, 2, [[[0, 1]], [[3]]])
    report = validate_cover(path4(), cover)
    assert not report.ok
    kinds = [v.kind for v in report.violations]
    assert kinds == ["uncovered-point"]
    assert report.violations[0].witness == (2,)


def test_separation_needs_strict_inequality():
    # clusters {0,1} and {2,3} sit at distance exactly 1 = lam: invalid
    cover = ScaledCover.of(1, 2, [[[0, 1], [2, 3]]])
    report = validate_cover(path4(), cover)
    assert [v.kind for v in report.violations] == ["family-separation"]
    v = report.violations[0]
    assert v.value == 1
    assert v.witness[3:] == (1, 2)  # the realising pair
    # the same clusters in different families are fine
    split = ScaledCover.of(1, 2, [[[0, 1]], [[2, 3]]])
    assert validate_cover(path4(), split).ok


def test_oversized_cluster_reported():
    cover = ScaledCover.of(1, 2, [[[0, 1, 2, 3]]])
    report = validate_cover(path4(), cover)
    assert [v.kind for v in report.violations] == ["cluster-diameter"]
    assert report.violations[0].value == 3


def test_out_of_range_point_is_usage_error():
    cover = ScaledCover.of(1, 2, [[[0, 9]]])
    with pytest.raises(ValueError, match="out of range"):
        validate_cover(path4(), cover)


def test_empty_cluster_rejected_at_construction():
    with pytest.raises(ValueError, match="nonempty"):
        ScaledCover.of(1, 2, [[[]]])


def test_cluster_normalisation_orders_by_min():
    cover = ScaledCover.of(0, 5, [[[3], [0, 2], [1]]])
    mins = [min(cl) for cl in cover.families[0]]
    assert mins == sorted(mins)


def test_shrink_removes_overlaps_and_is_idempotent():
    sp = path4()
    overlapping = ScaledCover.of(1, 2, [[[0, 1, 2]], [[2, 3]]])
    assert validate_cover(sp, overlapping).ok
    shrunk = shrink_to_partition(sp, overlapping)
    assert shrunk.families == ScaledCover.of(1, 2, [[[0, 1, 2]], [[3]]]).families
    assert len(shrunk.families) == len(overlapping.families)
    assert shrink_to_partition(sp, shrunk) == shrunk
    assert validate_cover(sp, shrunk).ok


def test_shrink_rejects_invalid_cover():
    sp = path4()
    with pytest.raises(ValueError, match="invalid cover"):
        shrink_to_partition(sp, ScaledCover.of(1, 2, [[[0, 1]]]))


def test_shrink_can_drop_emptied_clusters():
    sp = interval(5, 1)
    cover = ScaledCover.of(0, 3, [[[0, 1], [3, 4]], [[0, 1], [2], [5]]])
    assert validate_cover(sp, cover).ok
    shrunk = shrink_to_partition(sp, cover)
    assert shrunk.families[1] == (frozenset({2}), frozenset({5}))
    assert shrunk.point_count() == 6


def test_certificate_text_roundtrip():
    cover = ScaledCover.of(3, 7, [[[0, 2], [5]], [[1, 3, 4]]])
    cert = Certificate("demo", 6, cover)
    text = format_certificate(cert)
    back = parse_certificate(text)
    assert back == cert
    assert text.splitlines()[0] == "scaled-cover 1"
    assert "cluster 0 2" in text


def test_certificate_file_roundtrip(tmp_path):
    cover = ScaledCover.of(1, 2, [[[0, 1, 2]], [[3]]])
    cert = Certificate("interval(3,1)", 4, cover)
    path = tmp_path / "cert.txt"
    write_certificate(path, cert)
    assert read_certificate(path) == cert


@pytest.mark.parametrize("text, message", [
    ("nonsense\n", "not a certificate"),
    ("scaled-cover 1\nlabel: x\nsize: 2\nlambda: 1\n", "expected 'control'"),
    ("scaled-cover 1\nlabel: x\nsize: 2\nlambda: 1\ncontrol: 2\n"
     "families: 2\nfamily 0\ncluster 0 1\n", "says 2 families"),
    ("scaled-cover 1\nlabel: x\nsize: 2\nlambda: 1\ncontrol: 2\n"
     "families: 1\ncluster 0\n", "before any family"),
    ("scaled-cover 1\nlabel: x\nsize: 2\nlambda: a\ncontrol: 2\n"
     "families: 0\n", "must be integers"),
    ("scaled-cover 1\nlabel: x\nsize: 2\nlambda: 1\ncontrol: 2\n"
     "families: 1\nfamily 0\ncluster 0 q\n", "bad cluster"),
])
def test_certificate_parse_errors(text, message):
    with pytest.raises(ValueError, match=message):
        parse_certificate(text)


def test_empty_families_roundtrip():
    # a family with no clusters is legal (it pads a certificate to n+1)
    cover = ScaledCover.of(1, 3, [[[0, 1, 2, 3]], []])
    sp = path4()
    assert validate_cover(sp, cover).ok
    cert = Certificate("pad", 4, cover)
    assert parse_certificate(format_certificate(cert)) == cert
