import os
from dotenv import load_dotenv

load_dotenv()


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value not in (None, '') else default


class Config:
    """Base configuration"""

    # Seed used by randomized commands when --seed is omitted.
    # Unset means randomized commands must be given --seed explicitly.
    DEFAULT_SEED = _env_int('OMEGA_SEED', None)

    # joblib workers for restarts, radii and sample batches
    N_JOBS = _env_int('OMEGA_N_JOBS', 1)

    # Monte-Carlo sample sizes
    SAMPLES = _env_int('OMEGA_SAMPLES', 200_000)
    BATCH_SIZE = 50_000
    RESIDUAL_SAMPLES = 1_000
    MODULUS_PAIRS = 2_000
    DIAMETER_SAMPLES = 2_000

    # Comass ascent
    COMASS_RESTARTS = 64
    COMASS_TOL = 1e-10
    COMASS_MAX_ITER = 10_000

    # Verdict tolerances
    RESIDUAL_TOL = 1e-9
    GROWTH_DELTA = 0.05
    AFFINITY_TOL = 1e-6
    SUBHARMONIC_STEP = 1e-2

    # Properness search
    PROPER_RESOLUTION = 1e-3
    PROPER_MAX_RADIUS = 1e3
    SPHERE_DIRECTIONS = 10_000

    # Reports
    OUTPUT_DIR = os.environ.get('OMEGA_OUTPUT_DIR', 'reports')
    SCHEMA_VERSION = 1


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration (long batch runs)"""
    DEBUG = False
    N_JOBS = _env_int('OMEGA_N_JOBS', -1)


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    DEFAULT_SEED = 7
    N_JOBS = 1
    SAMPLES = 20_000
    BATCH_SIZE = 10_000
    RESIDUAL_SAMPLES = 1_000
    MODULUS_PAIRS = 500
    DIAMETER_SAMPLES = 500
    COMASS_RESTARTS = 8
    SPHERE_DIRECTIONS = 2_000
    PROPER_MAX_RADIUS = 100.0


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
