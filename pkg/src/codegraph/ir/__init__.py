"""Three-address lowering and control-flow graphs."""

from codegraph.ir.cfg import (CONTROL_KINDS, FLOW_KINDS, BasicBlock, Cfg, FlowEdge, FlowKind, build_cfg,
                              reverse_graph)
from codegraph.ir.tac import FunctionTac, Label, TacInstr, TacKind, is_temp, lower_to_tac

__all__ = [
    "CONTROL_KINDS", "FLOW_KINDS", "BasicBlock", "Cfg", "FlowEdge", "FlowKind", "FunctionTac", "Label",
    "TacInstr", "TacKind", "build_cfg", "is_temp", "lower_to_tac", "reverse_graph",
]
