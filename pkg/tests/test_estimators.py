import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from vesseltopo.exceptions import ShapeError
from vesseltopo.fragment import FragmentParams, VesselFragmenter, generate_breaks, vessel_shapes
from vesseltopo.repair import MorphologicalRepair, RepairParams, repair_mask
from vesseltopo.validation import check_mask, check_soft_mask


def test_get_set_params_and_clone():
    est = MorphologicalRepair(d_max=12, cos_min=0.7)
    assert est.get_params() == {"d_max": 12, "cos_min": 0.7, "width": "dt", "fixed_radius": 1}
    est.set_params(width="fixed", fixed_radius=2)
    assert clone(est).get_params()["fixed_radius"] == 2
    assert VesselFragmenter(seed=4).get_params()["seed"] == 4


def test_fragmenter_matches_function():
    shapes = list(vessel_shapes().values())[:3]
    frag = VesselFragmenter(breaks=2, seed=11)
    out = frag.fit_transform(shapes)
    for m, o, recs in zip(shapes, out, frag.records_):
        ref, ref_recs = generate_breaks(m, FragmentParams(2, 2, 5, 11))
        assert np.array_equal(o, ref) and recs == ref_recs


def test_pipeline_of_transformers():
    shapes = list(vessel_shapes().values())
    pipe = make_pipeline(VesselFragmenter(breaks=3, seed=2), MorphologicalRepair())
    repaired = pipe.fit(shapes).transform(shapes)
    fragmented = VesselFragmenter(breaks=3, seed=2).transform(shapes)
    for f, r in zip(fragmented, repaired):
        assert np.array_equal(r, repair_mask(f, RepairParams())[0])


def test_single_mask_rejected():
    with pytest.raises(ShapeError):
        MorphologicalRepair().fit(np.zeros((4, 4), bool))


def test_check_mask():
    assert check_mask([[0, 1], [1, 0]]).dtype == bool
    with pytest.raises(ValueError):
        check_mask([[0, 2]])
    with pytest.raises(ShapeError):
        check_mask(np.zeros(4))
    with pytest.raises(ShapeError):
        check_mask(np.zeros((0, 3)))


def test_check_soft_mask():
    assert check_soft_mask([[0.5]]).dtype == np.float64
    with pytest.raises(ValueError):
        check_soft_mask([[np.nan]])
