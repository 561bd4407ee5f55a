import numpy as np
import pytest

from carlab import field as fd
from carlab.gallery import builtin_fields, random_field, sin_times_x
from carlab.serialize import (DescriptorSyntaxError, parse_descriptor,
                              print_descriptor)


def roundtrip(f):
    text = print_descriptor(f)
    back = parse_descriptor(text)
    assert back.node == f.node
    assert back.p == f.p
    assert back.class_claim == f.class_claim
    assert back.dim_in == f.dim_in
    if f.jacobian is not None:
        assert back.jacobian.node == f.jacobian.node
    return back


def test_roundtrip_builtins():
    for name, f in builtin_fields().items():
        back = roundtrip(f)
        # spot-check evaluation equality
        t, x = 1.37, np.full(f.dim_in, 0.25)
        assert np.array_equal(fd.evaluate(back, t, x), fd.evaluate(f, t, x))


def test_roundtrip_random_fields(rng):
    for _ in range(25):
        roundtrip(random_field(rng))


def test_roundtrip_matrix_and_translate():
    inner = fd.MatrixAssemble(((fd.Constant((1.0,)), fd.Constant((0.5,))),
                               (fd.LinearInX(((2.0,),)), fd.Constant((0.0,)))))
    f = fd.FieldDescriptor(fd.Translate(1.5, inner), 1, 2.0, fd.SC)
    roundtrip(f)


def test_float_fidelity():
    f = fd.constant(0.1 + 0.2)  # not representable prettily
    back = roundtrip(f)
    assert back.node.data == f.node.data


def test_parse_errors():
    for text in ["", "(field", "(field :p 1 :dim 1)", "(wrong)",
                 "(field :p 1 :class LC :dim 1 (mystery 3))",
                 "(field :p x :class LC :dim 1 (const 0.0))",
                 "(field :p 1 :class LC :dim 1 (const 1) (const 2))",
                 "(field :p 1 :class LC :dim 1 (callback never-registered))"]:
        with pytest.raises(DescriptorSyntaxError):
            parse_descriptor(text)


def test_callback_by_name():
    text = print_descriptor(sin_times_x())
    assert "(callback sin-times-x)" in text
    back = parse_descriptor(text)
    assert back.node is sin_times_x().node
