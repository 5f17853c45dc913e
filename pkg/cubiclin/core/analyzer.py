#!/usr/bin/env python3
"""
analyzer.py - Full analysis of a matrix for cubiclin

Ties the matrix-class tests, the properness criterion and the witness
constructions together into one report.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from .. import __version__
from ..errors import CertificateInvalid
from .exact import Matrix, Vector
from .subspace import SubspaceBasis, colspace_basis, kernel_basis, rank
from ..maps.classes import ProbeSettings, class_z_probe, druzkowski_test
from ..maps.newton import NewtonSettings
from ..properness.criterion import (
    CandidateSearch,
    PropernessCertificate,
    Refusal,
    candidate_directions,
    kernel_root_inclusion,
)
from ..properness.structure import certify_zero_nonproper, sample_lines
from ..properness.witness import decay_csv, decay_slope, decay_table
from ..family.classz import ClassZCertificate, class_z_verdict
from ..utils.config import ConfigManager
from ..utils.serialization import basis_from_dict, basis_to_dict, matrix_digest, matrix_from_dict, matrix_to_dict

logger = logging.getLogger(__name__)


def _coords(x) -> List:
    return x.to_strings() if isinstance(x, Vector) else list(x.coords)


def probe_settings_from_config(config: ConfigManager, workers: int = 1) -> ProbeSettings:
    """ProbeSettings from the [PROBE] section"""
    newton = NewtonSettings(
        max_iterations=config.get_int("PROBE", "max_iterations"),
        max_halvings=config.get_int("PROBE", "max_halvings"),
        divergence_radius=config.get_float("PROBE", "divergence_radius"),
        residual_tolerance=config.get_float("PROBE", "residual_tolerance"),
    )
    return ProbeSettings(
        starts_per_lambda=config.get_int("PROBE", "starts_per_lambda"),
        radii=tuple(config.get_list("PROBE", "radii")),
        newton=newton,
        min_root_norm=config.get_float("PROBE", "min_root_norm"),
        escape_radius=config.get_float("PROBE", "escape_radius"),
        workers=workers,
    )


@dataclass
class AnalysisReport:
    """Everything known about one matrix

    Certificates are held as objects and re-verified when a report is
    loaded; the other sections are plain JSON data.
    """

    matrix: Matrix
    seed: int
    kernel: SubspaceBasis
    image: SubspaceBasis
    druzkowski: Dict[str, Any]
    class_z: Dict[str, Any]
    properness: Dict[str, Any]
    certificate: Optional[PropernessCertificate] = None
    class_z_certificate: Optional[ClassZCertificate] = None
    witnesses: Dict[str, Any] = field(default_factory=dict)
    lines: List[Dict[str, Any]] = field(default_factory=list)
    version: str = __version__
    timings: Optional[Dict[str, float]] = None

    @property
    def rank(self) -> int:
        return self.image.dim

    @property
    def corank(self) -> int:
        return self.kernel.dim

    def to_dict(self) -> Dict[str, Any]:
        properness = dict(self.properness)
        properness["certificate"] = self.certificate.to_dict() if self.certificate else None
        class_z = dict(self.class_z)
        if self.class_z_certificate is not None:
            class_z["certificate"] = self.class_z_certificate.to_dict()
        data = {
            "input": {
                "digest": matrix_digest(self.matrix),
                "dims": self.matrix.size,
                "matrix": matrix_to_dict(self.matrix),
            },
            "rank": self.rank,
            "corank": self.corank,
            "kernel_basis": basis_to_dict(self.kernel),
            "image_basis": basis_to_dict(self.image),
            "druzkowski": self.druzkowski,
            "class_z": class_z,
            "properness": properness,
            "witnesses": self.witnesses,
            "lines": self.lines,
            "version": self.version,
            "seed": self.seed,
        }
        if self.timings is not None:
            data["timings"] = self.timings
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AnalysisReport":
        """Rebuild a report, re-verifying every embedded certificate

        Raises:
            CertificateInvalid: If a certificate or the digest does not check out
        """
        matrix = matrix_from_dict(data["input"]["matrix"])
        if matrix_digest(matrix) != data["input"]["digest"]:
            raise CertificateInvalid("Matrix digest does not match")
        properness = dict(data["properness"])
        cert_data = properness.pop("certificate", None)
        class_z = dict(data["class_z"])
        cz_data = class_z.pop("certificate", None)
        return cls(
            matrix=matrix,
            seed=data["seed"],
            kernel=basis_from_dict(data["kernel_basis"]),
            image=basis_from_dict(data["image_basis"]),
            druzkowski=data["druzkowski"],
            class_z=class_z,
            properness=properness,
            certificate=PropernessCertificate.from_dict(cert_data) if cert_data else None,
            class_z_certificate=ClassZCertificate.from_dict(cz_data) if cz_data else None,
            witnesses=data.get("witnesses", {}),
            lines=data.get("lines", []),
            version=data.get("version", __version__),
            timings=data.get("timings"),
        )


class MatrixAnalyzer:
    """Runs every analysis on a matrix"""

    def __init__(self, config: Optional[ConfigManager] = None, seed: Optional[int] = None):
        """Initialize the analyzer

        Args:
            config: Configuration (defaults when omitted)
            seed: Seed override; see ConfigManager.seed for the fallbacks
        """
        self.config = config or ConfigManager()
        self.seed = self.config.seed(seed)
        self.progress_callback = None
        self._parse_config()

    def _parse_config(self):
        """Parse configuration values from config manager"""
        self.exact = self.config.get_bool("ANALYSIS", "exact")
        self.tolerance = self.config.get_float("ANALYSIS", "tolerance")
        self.workers = self.config.workers()
        self.timings_enabled = self.config.get_bool("ANALYSIS", "timings")

        self.trials = self.config.get_int("DRUZKOWSKI", "trials")
        self.sample_bound = self.config.get_int("DRUZKOWSKI", "sample_bound")

        self.lambdas = self.config.get_list("PROBE", "lambdas")
        self.probe_settings = probe_settings_from_config(self.config, self.workers)

        self.gammas = self.config.get_fraction_list("WITNESS", "gammas")
        self.decay_gammas = self.config.get_fraction_list("WITNESS", "decay_gammas")
        self.line_ts = self.config.get_list("WITNESS", "line_ts")
        self.randomized_candidates = self.config.get_int("WITNESS", "randomized_candidates")

    def set_progress_callback(self, callback: Callable[[float, str], None]):
        """Set a callback taking a percentage (0-100) and a status message"""
        self.progress_callback = callback

    def _update_progress(self, progress: float, status: str = ""):
        if self.progress_callback:
            self.progress_callback(progress, status)
        logger.debug("Progress %.0f%% %s", progress, status)

    def analyze(self, A: Matrix) -> AnalysisReport:
        """Analyze a square matrix

        Raises:
            NonConvergent: If a line sample cannot be fitted
        """
        timings: Dict[str, float] = {}

        def timed(name, func, *args, **kwargs):
            start = time.perf_counter()
            result = func(*args, **kwargs)
            timings[name] = time.perf_counter() - start
            return result

        self._update_progress(0, "Computing subspaces...")
        kernel = timed("subspaces", kernel_basis, A)
        image = colspace_basis(A)
        logger.info("Matrix of size %d, rank %d", A.size, rank(A))

        self._update_progress(15, "Running Druzkowski test...")
        druzkowski = timed("druzkowski", druzkowski_test, A, self.trials, self.seed, self.sample_bound)

        self._update_progress(30, "Checking class Z...")
        verdict = class_z_verdict(A) if A.size == 3 else None
        if verdict is None:
            verdict = timed("class_z", class_z_probe, A, self.lambdas, self.probe_settings.starts_per_lambda,
                            self.seed, self.probe_settings)
        class_z = verdict.to_dict()
        class_z.pop("certificate", None)

        self._update_progress(50, "Searching for non-properness certificates...")
        candidates = candidate_directions(A, CandidateSearch.KERNEL_ROOTS, tolerance=self.tolerance)
        if not self.exact:
            for c in candidate_directions(A, CandidateSearch.RANDOMIZED, self.randomized_candidates,
                                          self.seed, self.tolerance):
                if c not in candidates:
                    candidates.append(c)
        nonproper = timed("properness", certify_zero_nonproper, A, self.gammas, self.randomized_candidates,
                          self.seed, self.tolerance, self.workers)
        properness: Dict[str, Any] = {
            "candidates": [{"coords": _coords(c), "exact": isinstance(c, Vector)} for c in candidates],
            "kernel_root_inclusion": kernel_root_inclusion(A, self.tolerance),
        }

        report = AnalysisReport(A, self.seed, kernel, image, druzkowski.to_dict(), class_z, properness,
                                class_z_certificate=verdict.certificate)
        if isinstance(nonproper, Refusal):
            properness["status"] = "inconclusive: no certificate"
            properness["refusal"] = nonproper.to_dict()
        else:
            properness["status"] = "certified"
            properness["zero_is_nonproper"] = nonproper.zero_is_nonproper
            report.certificate = nonproper.certificate

            self._update_progress(70, "Building witnesses...")
            rows = timed("decay", decay_table, nonproper.certificate, self.decay_gammas, self.workers)
            report.witnesses = {
                "decay_csv": decay_csv(rows),
                "decay_slope": decay_slope([r.gamma for r in rows], [r.norm_fhat for r in rows]),
                "lifted": nonproper.lifted.to_dict(),
            }

            self._update_progress(85, "Sampling lines of non-proper values...")
            samples = timed("lines", sample_lines, A, nonproper.lifted, self.line_ts) if self.line_ts else []
            report.lines = [line.to_dict() for line in nonproper.lines]
            report.witnesses["line_samples"] = [s.to_dict() for s in samples]

        if self.timings_enabled:
            report.timings = timings
        self._update_progress(100, "Analysis complete")
        return report
