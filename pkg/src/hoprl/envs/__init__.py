from .base import TabularEnv
from .chain import ADVANCE, STAY, GatedChainEnv, GatedChainSpec, chain_step
from .crawler import ACTION_COUNT, CrawlerEnv, CrawlerSpec, build_crawler_model

__all__ = [
    "TabularEnv",
    "GatedChainEnv",
    "GatedChainSpec",
    "chain_step",
    "STAY",
    "ADVANCE",
    "CrawlerEnv",
    "CrawlerSpec",
    "build_crawler_model",
    "ACTION_COUNT",
]
