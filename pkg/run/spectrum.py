import hydra
from omegaconf import DictConfig

from src.config import SpectrumConfig
from src.experiment import main_entry, run_spectrum


@hydra.main(config_path="conf", config_name="spectrum", version_base="1.2")
def main(cfg: DictConfig):
    main_entry("spectrum", SpectrumConfig, run_spectrum)(cfg)


if __name__ == "__main__":
    main()
