"""Information-theoretic multi-label feature selection with an ML-KNN benchmark."""

from atrfs.dataset import DatasetSplit, MultiLabelDataset, discretize, load_arff, split
from atrfs.estimators import Discretizer, MultiLabelFeatureSelector
from atrfs.mlknn import MLkNN
from atrfs.selectors import METHODS, RankingResult, SelectorConfig, SelectorContext, greedy_rank

__version__ = "0.1.0"

__all__ = [
    "DatasetSplit",
    "MultiLabelDataset",
    "discretize",
    "load_arff",
    "split",
    "Discretizer",
    "MultiLabelFeatureSelector",
    "MLkNN",
    "METHODS",
    "RankingResult",
    "SelectorConfig",
    "SelectorContext",
    "greedy_rank",
]
