import hydra
from omegaconf import DictConfig

from src.config import DeflateConfig
from src.experiment import main_entry, run_deflate


@hydra.main(config_path="conf", config_name="deflate", version_base="1.2")
def main(cfg: DictConfig):
    main_entry("deflate", DeflateConfig, run_deflate)(cfg)


if __name__ == "__main__":
    main()
