"""Non-neural core of table structure recognition: spans, adjacency, alignment loss, metrics."""

from .align_loss import (AlignmentLossBreakdown, TotalLossInputs, alignment_loss,
                         alignment_loss_grad, total_loss)
from .eval_logical import bleu, table_to_tree, teds, to_markup, tree_edit_distance
from .eval_phys import (PRF, MatchResult, generate_relations, iou, match_cells,
                        micro_average, relation_f1, threshold_sweep)
from .formats import read_json, read_xml, write_json, write_xml
from .gt_prep import unify_boxes, words_to_cells
from .model import (AdjacencyMatrices, BBox, CellBox, Direction, Relation, RelationSet,
                    SpanIndices, TableAnnotation, validate_table)
from .structure import (adjacency_to_spans, check_consistency, compact_spans,
                        sample_pairs, spans_to_adjacency)
from .synth import corrupt, generate

__version__ = "0.1.0"
