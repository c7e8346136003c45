"""capsforge: a corpus refinery for caption-fusion datasets.

Pipeline stages: ingest sharded (image-ref, raw caption, synthetic
caption) corpora, fuse caption pairs through a chat-completion backend,
reject degenerate fusions, measure diversity statistics, score with the
consensus captioning metric, export finetuning triplets, and run
blinded pairwise human evaluation.
"""

from ._kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
