"""Accuracy metrics for cuts and matchings."""

import numpy as np


def cut_accuracy(labels, gt_labels):
    """Fraction of nodes on the right side, up to a global label flip. In [0.5, 1]."""
    labels = np.asarray(labels)
    gt_labels = np.asarray(gt_labels)
    if labels.shape != gt_labels.shape:
        raise ValueError(f"length mismatch: {labels.shape} vs {gt_labels.shape}")
    agree = int(np.sum(labels == gt_labels))
    n = labels.size
    return max(agree, n - agree) / n


def matching_accuracy(sigma, gt):
    """Fraction of nodes ``i`` with ``sigma[i] == gt[i]``."""
    sigma = np.asarray(sigma)
    gt = np.asarray(gt)
    if sigma.shape != gt.shape:
        raise ValueError(f"size mismatch: {sigma.shape} vs {gt.shape}")
    return float(np.mean(sigma == gt))


def inlier_accuracy(sigma, perm):
    """Two-graph accuracy over inliers only; ``perm[i] = -1`` marks an outlier."""
    sigma = np.asarray(sigma)
    perm = np.asarray(perm)
    inl = perm >= 0
    return float(np.mean(sigma[inl] == perm[inl]))
