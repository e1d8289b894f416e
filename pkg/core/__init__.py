from .tree import FreeTree, TreeClass, build_tree, classify, generate_free_trees
from .arrangement import LinearArrangement, DDistribution, sum_edge_lengths, enumerate_arrangements
from .baselines import BaselineBundle, compute_baselines, d_min_exact, d_max_exact
from .scores import ScoreRecord, AggregateRow, score_sentence, aggregate
