"""aqilens: county-level panel toolkit linking alternative-fuel-vehicle
adoption, socioeconomic census data, and a PCA-based composite air-quality
score, with a linear what-if prediction model served over CLI and HTTP."""

__version__ = "0.1.0"
