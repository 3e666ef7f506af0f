# Configuration package for mpspec; settings are re-exported at package level
from .settings import *
