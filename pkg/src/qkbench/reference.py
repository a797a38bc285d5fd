"""Published benchmark values, used to annotate generated tables with reference bands.

Each cell is ``(svc_loss or None, acc_train, acc_test)``; classical rows have no
"after" cell.
"""
from __future__ import annotations

Cell = tuple  # (loss | None, acc_train, acc_test)

ROW_KEYS = (
    ("zz", "shared"),
    ("zz", "dedicated"),
    ("covariant", "shared"),
    ("covariant", "dedicated"),
    ("logistic", None),
    ("svm-linear", None),
    ("svm-poly", None),
    ("svm-rbf", None),
)


def _table(quantum, classical):
    rows = dict(zip(ROW_KEYS[:4], quantum))
    rows.update({key: (cell, None) for key, cell in zip(ROW_KEYS[4:], classical)})
    return rows


REFERENCE = {
    "adhoc-zz": _table(
        [((23.75, 0.98, 0.99), (23.52, 0.98, 0.99)),
         ((23.75, 0.98, 1.0), (23.41, 1.0, 1.0)),
         ((166.29, 0.64, 0.62), (151.92, 0.69, 0.69)),
         ((166.29, 0.64, 0.62), (151.92, 0.69, 0.68))],
        [(None, 0.56, 0.48), (None, 0.56, 0.48), (None, 0.57, 0.50), (None, 0.59, 0.44)],
    ),
    "adhoc-cov": _table(
        [((30.0, 1.0, 0.67), (29.9, 1.0, 0.87)),
         ((30.0, 1.0, 0.67), (29.57, 1.0, 0.57)),
         ((19.08, 1.0, 0.82), (16.38, 1.0, 0.90)),
         ((19.59, 1.0, 0.82), (16.38, 1.0, 0.90))],
        [(None, 1.0, 0.50), (None, 1.0, 0.52), (None, 1.0, 0.42), (None, 1.0, 0.62)],
    ),
    "iris-linear": _table(
        [((35.0, 0.99, 0.63), (32.82, 1.0, 0.50)),
         ((35.0, 0.99, 0.63), (28.83, 0.97, 0.57)),
         ((21.07, 0.90, 0.90), (20.42, 0.91, 0.90)),
         ((21.07, 0.90, 0.90), (19.41, 0.91, 0.90))],
        [(None, 1.0, 1.0), (None, 1.0, 1.0), (None, 1.0, 1.0), (None, 1.0, 1.0)],
    ),
    "iris-nonlinear": _table(
        [((40.35, 0.99, 0.63), (31.72, 0.97, 0.77)),
         ((40.35, 0.99, 0.63), (31.0, 0.99, 0.63)),
         ((47.3, 0.76, 0.77), (42.21, 0.77, 0.83)),
         ((47.30, 0.76, 0.77), (39.88, 0.79, 0.83))],
        [(None, 0.97, 1.0), (None, 0.96, 1.0), (None, 1.0, 0.97), (None, 0.97, 0.97)],
    ),
    "mnist-pca-4": _table(
        [((153.43, 0.88, 0.58), (145.56, 0.89, 0.60)),
         ((153.43, 0.88, 0.58), (140.66, 0.90, 0.59)),
         ((192.27, 0.62, 0.67), (186.3, 0.68, 0.65)),
         ((192.27, 0.62, 0.67), (182.40, 0.71, 0.63))],
        [(None, 0.76, 0.77), (None, 0.78, 0.78), (None, 0.89, 0.75), (None, 0.82, 0.78)],
    ),
    "mnist-pca-8": _table(
        [((116.44, 1.0, 0.49), (101.09, 1.0, 0.61)),
         ((116.44, 1.0, 0.49), (109.2, 1.0, 0.49)),
         ((151.71, 0.75, 0.67), (129.8, 0.87, 0.60)),
         ((151.71, 0.75, 0.67), (120.36, 0.88, 0.60))],
        [(None, 0.94, 0.92), (None, 0.94, 0.94), (None, 1.0, 0.92), (None, 0.98, 0.94)],
    ),
}

TITLES = {
    "adhoc-zz": "Ad-hoc-ZZ",
    "adhoc-cov": "Ad-hoc-COV",
    "iris-linear": "Linear-IRIS",
    "iris-nonlinear": "Non-linear-IRIS",
    "mnist-pca-4": "MNIST-PCA-4",
    "mnist-pca-8": "MNIST-PCA-8",
}
