import pytest

from otmap.utils import FamilyType, MethodType, SourceType, StructureType


def test_from_value():
    assert StructureType.from_value("KRSV") is StructureType.KRSV
    assert StructureType.from_value(StructureType.KR) is StructureType.KR
    assert FamilyType.from_value("monomial") is FamilyType.MONOMIAL
    assert SourceType.from_value("two_gaussian_mixture") is SourceType.TWO_GAUSSIAN_MIXTURE
    assert MethodType.from_value("both") is MethodType.BOTH


def test_from_value_invalid():
    with pytest.raises(ValueError, match="not a valid StructureType"):
        StructureType.from_value("sparse")


def test_is_triangular():
    assert not StructureType.DENSE.is_triangular
    assert StructureType.KR.is_triangular
    assert StructureType.KRSV.is_triangular
