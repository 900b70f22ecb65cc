"""Hierarchical summarization for long dialogues.

The pipeline turns a dialogue that exceeds a summarizer's input budget
into something it can handle: segment the dialogue at topic shifts, pack
segments into budget-sized splits, condense each split into a short
summary and an event list, then hand the concatenated condensations plus
the dialogue's opening lines to a final summarizer. Scoring is ROUGE-1/2/L
against gold summaries.
"""

from .condenser import (
    Condensation,
    EnrichedInput,
    GenerationError,
    HttpChatLLM,
    MockLLM,
    PromptTemplate,
    ResponseCache,
    build_llm,
    condense_dialogue,
    condense_split,
    enrich,
)
from .corpus import (
    Corpus,
    CorpusError,
    Dialogue,
    Utterance,
    dump_corpus,
    lead,
    load_corpus,
)
from .embedder import EmbeddingError, HashEmbedder, HttpEmbedder, build_embedder
from .pipeline import (
    MissingStageError,
    Pipeline,
    PipelineError,
    STAGES,
    config_hash,
    export_training_file,
    load_config,
    run_pipeline,
)
from .rouge import Score, aggregate, lcs_length, rouge_l, rouge_n, score, tokenize
from .segmenter import (
    Segmentation,
    SegmentationError,
    segment_dialogue,
    segments_from_breakpoints,
    select_breakpoints,
    similarity_curve,
    threshold_breakpoints,
    window_text,
)
from .splitter import SplitError, SplitPlan, plan_splits, render_span, split_dialogue
from .stemmer import stem
from .summarizer import (
    HttpModelSummarizer,
    LLMSummarizer,
    PassthroughSummarizer,
    SummarizationError,
    build_summarizer,
)

__version__ = "0.1.0"

__all__ = [
    "Condensation",
    "Corpus",
    "CorpusError",
    "Dialogue",
    "EmbeddingError",
    "EnrichedInput",
    "GenerationError",
    "HashEmbedder",
    "HttpChatLLM",
    "HttpEmbedder",
    "HttpModelSummarizer",
    "LLMSummarizer",
    "MissingStageError",
    "MockLLM",
    "PassthroughSummarizer",
    "Pipeline",
    "PipelineError",
    "PromptTemplate",
    "ResponseCache",
    "STAGES",
    "Score",
    "Segmentation",
    "SegmentationError",
    "SplitError",
    "SplitPlan",
    "SummarizationError",
    "Utterance",
    "aggregate",
    "build_embedder",
    "build_llm",
    "build_summarizer",
    "condense_dialogue",
    "condense_split",
    "config_hash",
    "dump_corpus",
    "enrich",
    "export_training_file",
    "lcs_length",
    "lead",
    "load_config",
    "load_corpus",
    "plan_splits",
    "render_span",
    "rouge_l",
    "rouge_n",
    "run_pipeline",
    "score",
    "segment_dialogue",
    "segments_from_breakpoints",
    "select_breakpoints",
    "similarity_curve",
    "split_dialogue",
    "stem",
    "threshold_breakpoints",
    "tokenize",
    "window_text",
]
