import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    # Subsystem defaults (frequencies in units of the first cavity frequency)
    FOCK_LEVELS = int(os.environ.get("FOCK_LEVELS", "10"))
    QUBIT_CONVENTION = os.environ.get("QUBIT_CONVENTION", "half")  # half | full
    COUPLING = float(os.environ.get("COUPLING", "0.2"))

    # Bell-state measurement: below this success probability the
    # concurrence is reported as undefined
    BSM_EPSILON = float(os.environ.get("BSM_EPSILON", "1e-9"))

    # Sweep grid (time in units of 1/omega_1)
    T_START = float(os.environ.get("T_START", "0"))
    T_STOP = float(os.environ.get("T_STOP", "100"))
    T_STEP = float(os.environ.get("T_STEP", "0.05"))
    SCAN_T_STOP = float(os.environ.get("SCAN_T_STOP", "400"))

    # Sweep engine
    SWEEP_WORKERS = int(os.environ.get("SWEEP_WORKERS", "1"))
    SWEEP_CHUNK = int(os.environ.get("SWEEP_CHUNK", "512"))

    # Truncation adequacy
    TRUNCATION_FACTOR = int(os.environ.get("TRUNCATION_FACTOR", "2"))
    LEAKAGE_THRESHOLD = float(os.environ.get("LEAKAGE_THRESHOLD", "0.01"))

    CSV_DIGITS = int(os.environ.get("CSV_DIGITS", "12"))
    LOG_LEVEL = os.environ.get("LOG_LEVEL", "WARNING").upper()
