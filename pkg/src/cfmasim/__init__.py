"""Compute-forward multiple access: nested LDPC codes, decoding chains and rate regions."""
from .cfma import (CfmaCodebook, CfmaResult, decode_cfma, decode_cfma_binary, decode_cfma_complex,
                   decode_cfma_multilevel, decode_kuser, run_interference, sum_mod)
from .gf2_codes import (NestedCodePair, ParityCheckMatrix, build_nested_pair, derive_encoder, encode,
                        parse_alist, regular_ldpc, write_alist)
from .modulation import ModulationSpec
from .rate_region import EntropyEstimator, cfma_corners, conditional_entropies, mac_region, min_power_db
from .simharness import parse_config, run_ber_point, run_sweep
from .spa import spa_decode

__version__ = "0.1.0"

__all__ = [
    "CfmaCodebook", "CfmaResult", "decode_cfma", "decode_cfma_binary", "decode_cfma_complex",
    "decode_cfma_multilevel", "decode_kuser", "run_interference", "sum_mod",
    "NestedCodePair", "ParityCheckMatrix", "build_nested_pair", "derive_encoder", "encode",
    "parse_alist", "regular_ldpc", "write_alist", "ModulationSpec",
    "EntropyEstimator", "cfma_corners", "conditional_entropies", "mac_region", "min_power_db",
    "parse_config", "run_ber_point", "run_sweep", "spa_decode",
]
