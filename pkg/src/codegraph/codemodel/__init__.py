"""Hierarchical source-code model: augmented block ASTs, vocabulary, CodeGraph."""

from codegraph.codemodel.augment import (AstNode, BlockAst, augment_block_ast, augment_node, decompose_constant,
                                         split_camel)
from codegraph.codemodel.graph import (Analysis, CodeGraph, analyze, assemble_graph, bow_block_features,
                                       build_code_graph, deserialize, serialize)
from codegraph.codemodel.vocab import UNK, Vocabulary, build_vocab

__all__ = [
    "Analysis", "AstNode", "BlockAst", "CodeGraph", "UNK", "Vocabulary", "analyze", "assemble_graph",
    "augment_block_ast", "augment_node", "bow_block_features", "build_code_graph", "build_vocab",
    "decompose_constant", "deserialize", "serialize", "split_camel",
]
