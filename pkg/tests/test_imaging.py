import numpy as np
import pytest

from ordinalflow.imaging import (
    BinaryMask,
    Frame,
    StructuringElement,
    closing,
    connected_components,
    dilate,
    erode,
    opening,
    preprocess,
    to_grayscale,
)


def gray(arr, index=0):
    return Frame(np.asarray(arr, dtype=np.uint8), index)


# ---------------------------------------------------------------- oracles

def erode_oracle(bits, offsets):
    h, w = bits.shape
    out = np.zeros_like(bits)
    for y in range(h):
        for x in range(w):
            ok = True
            for dx, dy in offsets:
                yy, xx = y + dy, x + dx
                if not (0 <= yy < h and 0 <= xx < w) or not bits[yy, xx]:
                    ok = False
                    break
            out[y, x] = ok
    return out


def dilate_oracle(bits, offsets):
    h, w = bits.shape
    out = np.zeros_like(bits)
    for y in range(h):
        for x in range(w):
            for dx, dy in offsets:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and bits[yy, xx]:
                    out[y, x] = True
                    break
    return out


def flood_fill_components(bits):
    """8-connected partition via BFS, components in raster order of
    their first pixel."""
    h, w = bits.shape
    seen = np.zeros_like(bits, dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if bits[y, x] and not seen[y, x]:
                stack = [(y, x)]
                seen[y, x] = True
                pix = []
                while stack:
                    cy, cx = stack.pop()
                    pix.append((cy, cx))
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            ny, nx = cy + dy, cx + dx
                            if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and not seen[ny, nx]:
                                seen[ny, nx] = True
                                stack.append((ny, nx))
                comps.append(pix)
    return comps


def bilinear_oracle(src, tw, th):
    """Scalar bilinear resample at half-pixel-aligned target centers."""
    h, w = src.shape
    out = np.zeros((th, tw))
    for ty in range(th):
        for tx in range(tw):
            sx = (tx + 0.5) * (w / tw) - 0.5
            sy = (ty + 0.5) * (h / th) - 0.5
            x0 = min(max(int(np.floor(sx)), 0), w - 1)
            y0 = min(max(int(np.floor(sy)), 0), h - 1)
            x1 = min(x0 + 1, w - 1)
            y1 = min(y0 + 1, h - 1)
            fx = min(max(sx - np.floor(sx), 0.0), 1.0)
            fy = min(max(sy - np.floor(sy), 0.0), 1.0)
            top = src[y0, x0] * (1 - fx) + src[y0, x1] * fx
            bot = src[y1, x0] * (1 - fx) + src[y1, x1] * fx
            out[ty, tx] = top * (1 - fy) + bot * fy
    return np.floor(out + 0.5).astype(np.uint8)


# ------------------------------------------------------------- preprocess

def test_preprocess_identity_resize():
    rng = np.random.default_rng(0)
    fr = gray(rng.integers(0, 256, (224, 224)))
    out = preprocess(fr, 224, 224)
    assert np.array_equal(out.pixels, fr.pixels)


def test_preprocess_constant_upsample():
    fr = gray(np.full((2, 2), 37))
    out = preprocess(fr, 4, 4)
    assert out.width == 4 and out.height == 4
    assert np.all(out.pixels == 37)


def test_preprocess_downsample_matches_bilinear_oracle():
    src = np.arange(16, dtype=np.uint8).reshape(4, 4) * 16
    out = preprocess(gray(src), 2, 2)
    assert np.array_equal(out.pixels, bilinear_oracle(src.astype(float), 2, 2))


def test_preprocess_random_sizes_match_oracle():
    rng = np.random.default_rng(7)
    for tw, th in [(3, 5), (7, 2), (10, 10)]:
        src = rng.integers(0, 256, (6, 4)).astype(np.uint8)
        out = preprocess(gray(src), tw, th)
        assert np.array_equal(out.pixels, bilinear_oracle(src.astype(float), tw, th))


def test_preprocess_zero_target_rejected():
    fr = gray(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        preprocess(fr, 0, 4)
    with pytest.raises(ValueError):
        preprocess(fr, 4, 0)


def test_preprocess_bgr_to_rgb():
    px = np.zeros((2, 2, 3), dtype=np.uint8)
    px[:, :, 0] = 10  # B plane in BGR input
    px[:, :, 2] = 30  # R plane
    out = preprocess(Frame(px), 2, 2)
    assert np.all(out.pixels[:, :, 0] == 30)
    assert np.all(out.pixels[:, :, 2] == 10)


def test_preprocess_deterministic():
    rng = np.random.default_rng(3)
    src = rng.integers(0, 256, (9, 7)).astype(np.uint8)
    a = preprocess(gray(src), 5, 5).pixels
    b = preprocess(gray(src), 5, 5).pixels
    assert np.array_equal(a, b)


# ------------------------------------------------------------ to_grayscale

def test_grayscale_passthrough():
    fr = gray(np.arange(9).reshape(3, 3))
    assert to_grayscale(fr) is fr


def test_grayscale_white():
    fr = Frame(np.full((2, 2, 3), 255, dtype=np.uint8))
    assert np.all(to_grayscale(fr).pixels == 255)


def test_grayscale_luma_sum():
    px = np.zeros((1, 1, 3), dtype=np.uint8)
    px[0, 0] = (100, 50, 200)
    # 0.299*100 + 0.587*50 + 0.114*200 = 82.05 -> 82
    assert to_grayscale(Frame(px)).pixels[0, 0] == 82


# ------------------------------------------------------------- morphology

def test_ellipse_se_contains_origin_and_is_symmetric():
    for rx, ry in [(0, 0), (1, 1), (2, 2), (3, 1)]:
        se = StructuringElement.ellipse(rx, ry)
        offs = set(se.offsets)
        assert (0, 0) in offs
        assert all((-dx, -dy) in offs for dx, dy in offs)


def test_ellipse_3x3_is_full_block():
    se = StructuringElement.ellipse(1, 1)
    assert len(se.offsets) == 9


def test_morphology_empty_mask_fixed_point():
    se = StructuringElement.ellipse(1, 1)
    m = BinaryMask(np.zeros((8, 8), dtype=bool))
    assert not erode(m, se).bits.any()
    assert not dilate(m, se).bits.any()


def test_single_pixel_erode_dilate():
    se = StructuringElement.ellipse(1, 1)
    bits = np.zeros((7, 7), dtype=bool)
    bits[3, 3] = True
    m = BinaryMask(bits)
    assert not erode(m, se).bits.any()
    d = dilate(m, se).bits
    expected = np.zeros((7, 7), dtype=bool)
    expected[2:5, 2:5] = True
    assert np.array_equal(d, expected)


def test_single_pixel_dilate_clips_at_border():
    se = StructuringElement.ellipse(1, 1)
    bits = np.zeros((4, 4), dtype=bool)
    bits[0, 0] = True
    d = dilate(BinaryMask(bits), se).bits
    expected = np.zeros((4, 4), dtype=bool)
    expected[0:2, 0:2] = True
    assert np.array_equal(d, expected)


def test_erode_dilate_match_double_loop_oracle():
    rng = np.random.default_rng(11)
    for se in [StructuringElement.ellipse(1, 1), StructuringElement.ellipse(2, 2)]:
        for _ in range(10):
            bits = rng.random((16, 16)) < 0.45
            m = BinaryMask(bits)
            assert np.array_equal(erode(m, se).bits, erode_oracle(bits, se.offsets))
            assert np.array_equal(dilate(m, se).bits, dilate_oracle(bits, se.offsets))


def test_opening_removes_speckle():
    se = StructuringElement.ellipse(2, 2)
    bits = np.zeros((11, 11), dtype=bool)
    bits[5, 5] = True
    assert not opening(BinaryMask(bits), se).bits.any()


def test_closing_fills_hole():
    se = StructuringElement.ellipse(1, 1)
    bits = np.zeros((9, 9), dtype=bool)
    bits[1:8, 1:8] = True
    bits[4, 4] = False
    out = closing(BinaryMask(bits), se).bits
    assert out[4, 4]


def test_opening_idempotent_anti_extensive_closing_extensive():
    rng = np.random.default_rng(5)
    se = StructuringElement.ellipse(1, 1)
    for _ in range(8):
        bits = rng.random((20, 20)) < 0.5
        m = BinaryMask(bits)
        o1 = opening(m, se)
        o2 = opening(o1, se)
        assert np.array_equal(o1.bits, o2.bits)
        assert not (o1.bits & ~bits).any()  # open(m) subset of m
        c1 = closing(m, se)
        c2 = closing(c1, se)
        assert np.array_equal(c1.bits, c2.bits)
        # extensivity holds away from the border (outside counts as
        # background, so border-adjacent foreground may erode)
        assert not (bits[1:-1, 1:-1] & ~c1.bits[1:-1, 1:-1]).any()


def test_erode_dilate_duality_in_interior():
    # dilate(m) == ~erode(~m) away from the border, where the
    # outside-is-background conventions of the two sides differ
    rng = np.random.default_rng(9)
    se = StructuringElement.ellipse(2, 2)
    for _ in range(8):
        bits = rng.random((20, 20)) < 0.5
        a = dilate(BinaryMask(bits), se).bits
        b = ~erode(BinaryMask(~bits), se).bits
        assert np.array_equal(a[2:-2, 2:-2], b[2:-2, 2:-2])


# ---------------------------------------------------- connected components

def test_components_empty_mask():
    assert connected_components(BinaryMask(np.zeros((5, 5), dtype=bool)), 1) == []


def test_components_two_blocks():
    bits = np.zeros((10, 10), dtype=bool)
    bits[1:4, 1:4] = True
    bits[6:9, 6:9] = True
    comps = connected_components(BinaryMask(bits), 1)
    assert [c.area for c in comps] == [9, 9]
    assert [c.label for c in comps] == [1, 2]
    assert comps[0].bbox == (1, 1, 3, 3)
    assert comps[0].centroid == (2.0, 2.0)


def test_components_min_area_filter():
    bits = np.zeros((10, 10), dtype=bool)
    bits[0, 0] = True
    bits[5:8, 5:8] = True
    comps = connected_components(BinaryMask(bits), min_area=2)
    assert len(comps) == 1
    assert comps[0].area == 9


def test_components_match_flood_fill_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        bits = rng.random((32, 32)) < 0.4
        comps = connected_components(BinaryMask(bits), 1)
        oracle = flood_fill_components(bits)
        assert len(comps) == len(oracle)
        # same partition, and same raster order of first pixels
        for got, pix in zip(comps, oracle):
            assert got.area == len(pix)
            ys = [p[0] for p in pix]
            xs = [p[1] for p in pix]
            assert got.bbox == (min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)
            assert got.centroid == pytest.approx((np.mean(xs), np.mean(ys)))
        areas = sum(c.area for c in comps)
        assert areas == int(bits.sum())


def test_components_labels_stable_across_calls():
    rng = np.random.default_rng(2)
    bits = rng.random((16, 16)) < 0.4
    a = connected_components(BinaryMask(bits), 1)
    b = connected_components(BinaryMask(bits), 1)
    assert [(c.label, c.area, c.bbox) for c in a] == [(c.label, c.area, c.bbox) for c in b]


def test_components_min_area_validation():
    with pytest.raises(ValueError):
        connected_components(BinaryMask(np.zeros((3, 3), dtype=bool)), 0)
