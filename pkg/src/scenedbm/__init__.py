"""Scene recognition from SLIC superpixels, a two-layer DBM and softmax regression."""

from scenedbm.dbm import DbmConfig, DbmParams, extract_features, pretrain_dbm, reconstruct
from scenedbm.netpbm import Image, read_netpbm, write_netpbm
from scenedbm.rbm import CdConfig, RbmParams, train_rbm
from scenedbm.slic import SlicConfig, SuperpixelMap, rgb_to_lab, run_slic, superpixels_to_grid
from scenedbm.softmax import LabeledSet, SoftmaxParams, predict, train_softmax

__version__ = "0.1.0"

__all__ = [
    "CdConfig",
    "DbmConfig",
    "DbmParams",
    "Image",
    "LabeledSet",
    "RbmParams",
    "SlicConfig",
    "SoftmaxParams",
    "SuperpixelMap",
    "extract_features",
    "predict",
    "pretrain_dbm",
    "read_netpbm",
    "reconstruct",
    "rgb_to_lab",
    "run_slic",
    "superpixels_to_grid",
    "train_rbm",
    "train_softmax",
    "write_netpbm",
]
