"""Adaptive per-pixel Gaussian-mixture background subtraction.

Each pixel's intensity history is modeled by up to k_max Gaussians
(weight, mean, variance). A frame pixel is background when it matches a
component inside the high-weight prefix of the mixture, otherwise it is
reported as foreground and a fresh component is inserted.

Update conventions (the algorithm family leaves these open; they are
pinned here and mirrored by the test oracle):
  - components are ranked by weight/sqrt(variance), strongest first,
    with ties keeping their previous order;
  - only the strongest matching component is updated;
  - the mean/variance rate is learning_rate / weight using the weight
    *after* the weight update, capped at 1;
  - mean and variance updates both use the delta against the
    pre-update mean;
  - the insertion path replaces the weakest slot (or fills an empty
    one) and renormalizes weights without decaying the others.

There is no separate "history" knob: the effective memory is the
reciprocal of learning_rate (rho=0.01 behaves like a ~100-frame history).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotReadyError
from .imaging import BinaryMask, Frame, _to_u8


@dataclass
class SubtractorParams:
    k_max: int = 5
    learning_rate: float = 0.01
    match_threshold_sq: float = 16.0  # squared sigmas, 16 = 4 sigma
    background_ratio: float = 0.9
    initial_variance: float = 225.0
    variance_floor: float = 4.0
    new_component_weight: float = 0.05

    def validate(self) -> None:
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 < self.background_ratio < 1.0:
            raise ValueError("background_ratio must be in (0, 1)")
        if self.match_threshold_sq <= 0.0:
            raise ValueError("match_threshold_sq must be positive")
        if self.variance_floor <= 0.0:
            raise ValueError("variance_floor must be positive")
        if self.initial_variance < self.variance_floor:
            raise ValueError("initial_variance must be >= variance_floor")
        if not 0.0 < self.new_component_weight <= 1.0:
            raise ValueError("new_component_weight must be in (0, 1]")


class BackgroundSubtractor:
    """Mutable per-stream subtractor state. Call apply() once per frame,
    in order; one instance per video stream.

    State arrays are (n_pixels, k_max); rows are re-ranked lazily at the
    start of apply(), so already-ordered pixels (the vast majority after
    burn-in) skip the sort entirely.
    """

    def __init__(self, width: int, height: int, params: SubtractorParams | None = None):
        if width <= 0 or height <= 0:
            raise ValueError("dimensions must be positive")
        params = params if params is not None else SubtractorParams()
        params.validate()
        self.width = width
        self.height = height
        self.params = params
        self.frames_seen = 0
        n = width * height
        k = params.k_max
        self.weights = np.zeros((n, k))
        self.means = np.zeros((n, k))
        self.variances = np.full((n, k), params.initial_variance)

    def _sort_components(self) -> None:
        """(a) rank by weight/sqrt(variance) descending, stable on ties;
        empty slots (weight 0) sink to the end. Only rows that are out
        of order get touched."""
        fit = self.weights / np.sqrt(self.variances)
        bad = (fit[:, 1:] > fit[:, :-1]).any(axis=1)
        if bad.any():
            rows = np.nonzero(bad)[0]
            order = np.argsort(-fit[rows], axis=1, kind="stable")
            self.weights[rows] = np.take_along_axis(self.weights[rows], order, axis=1)
            self.means[rows] = np.take_along_axis(self.means[rows], order, axis=1)
            self.variances[rows] = np.take_along_axis(self.variances[rows], order, axis=1)

    def apply(self, frame: Frame) -> BinaryMask:
        """Classify one grayscale frame and update the model in place."""
        if frame.channels != 1:
            raise ValueError("subtractor expects grayscale frames")
        if (frame.height, frame.width) != (self.height, self.width):
            raise ValueError(
                f"frame is {frame.width}x{frame.height}, "
                f"subtractor is {self.width}x{self.height}"
            )
        p = self.params
        k = p.k_max
        rho = p.learning_rate
        x = frame.pixels.astype(np.float64).ravel()

        self._sort_components()
        w, m, v = self.weights, self.means, self.variances

        # Fast path: a pixel matching its strongest component is always
        # background (slot 0 is in every non-empty prefix) and slot 0 is
        # the component to update. After burn-in this covers nearly
        # every pixel, so the general prefix/match machinery below only
        # runs on the leftovers.
        d0 = x - m[:, 0]
        fast = (w[:, 0] > 0.0) & (d0 * d0 <= p.match_threshold_sq * v[:, 0])
        fg = np.zeros(x.shape[0], dtype=bool)

        srows = np.nonzero(~fast)[0]
        if srows.size:
            xs = x[srows]
            ws = w[srows]
            vs = v[srows]
            used = ws > 0.0

            # (b) background prefix: smallest prefix with cumulative weight >= T
            cumw = np.cumsum(ws, axis=1)
            in_bg = cumw >= p.background_ratio - 1e-12
            bg_count = np.where(in_bg.any(axis=1), in_bg.argmax(axis=1) + 1, 0)

            # (c) match against each component
            d = xs[:, None] - m[srows]
            match = used & (d * d <= p.match_threshold_sq * vs)
            matched = match.any(axis=1)

            # (f) foreground iff nothing matches within the background prefix
            prefix = np.arange(k)[None, :] < bg_count[:, None]
            fg[srows] = ~(match & prefix).any(axis=1)

            # (d) update the strongest matching component
            rows = srows[matched]
            if rows.size:
                j = match[matched].argmax(axis=1)
                w[rows] *= 1.0 - rho
                w[rows, j] += rho
                rate = np.minimum(rho / w[rows, j], 1.0)
                delta = x[rows] - m[rows, j]
                m[rows, j] += rate * delta
                v[rows, j] = np.maximum(
                    p.variance_floor, v[rows, j] + rate * (delta * delta - v[rows, j])
                )

            # (e) no match anywhere: insert a new component and renormalize
            urows = srows[~matched]
            if urows.size:
                n_used = used[~matched].sum(axis=1)
                target = np.minimum(n_used, k - 1)
                w[urows, target] = p.new_component_weight
                m[urows, target] = x[urows]
                v[urows, target] = p.initial_variance
                w[urows] /= w[urows].sum(axis=1, keepdims=True)

        if fast.any():
            # same arithmetic as branch (d) specialized to j = 0; rows
            # outside the fast set are scaled by exactly 1.0 (a no-op)
            w *= np.where(fast, 1.0 - rho, 1.0)[:, None]
            w0 = w[fast, 0]
            w0 += rho
            w[fast, 0] = w0
            rate = np.minimum(rho / w0, 1.0)
            delta = d0[fast]
            m[fast, 0] += rate * delta
            vf = v[fast, 0]
            v[fast, 0] = np.maximum(
                p.variance_floor, vf + rate * (delta * delta - vf)
            )

        self.frames_seen += 1
        return BinaryMask(fg.reshape(self.height, self.width))

    def background_image(self) -> Frame:
        """Mean of each pixel's strongest component, as a grayscale frame."""
        if self.frames_seen == 0:
            raise NotReadyError("no frames processed yet")
        fitness = np.where(
            self.weights > 0.0, self.weights / np.sqrt(self.variances), -1.0
        )
        best = fitness.argmax(axis=1)
        idx = np.arange(self.weights.shape[0])
        vals = np.where((self.weights > 0.0).any(axis=1), self.means[idx, best], 0.0)
        return Frame(_to_u8(vals.reshape(self.height, self.width)))
