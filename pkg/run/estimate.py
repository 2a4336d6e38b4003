import hydra
from omegaconf import DictConfig

from src.config import EstimateConfig
from src.experiment import main_entry, run_estimate


@hydra.main(config_path="conf", config_name="estimate", version_base="1.2")
def main(cfg: DictConfig):
    main_entry("estimate", EstimateConfig, run_estimate)(cfg)


if __name__ == "__main__":
    main()
