from ._qdopt import (
    Error,
    Graph,
    bits_for_level,
    build_graph,
    codec_roundtrip,
    format_graph,
    gt_certificate,
    laplacian_eigenvalues,
    oracle,
    paper_suite_value,
    parse_config,
    parse_graph,
    pi_certificate,
    quantize,
    random_connected_graph,
    run,
)

__all__ = [
    "Error",
    "Graph",
    "bits_for_level",
    "build_graph",
    "codec_roundtrip",
    "format_graph",
    "gt_certificate",
    "laplacian_eigenvalues",
    "oracle",
    "paper_suite_value",
    "parse_config",
    "parse_graph",
    "pi_certificate",
    "quantize",
    "random_connected_graph",
    "run",
]
