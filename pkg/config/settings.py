from pydantic_settings import BaseSettings
from typing import Literal


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Trivergence Toolkit"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: Literal["text", "json"] = "text"

    # CLI defaults
    DEFAULT_MODE: Literal["paper-literal", "token", "strict"] = "paper-literal"
    DEFAULT_BASE: Literal["kl", "js"] = "kl"
    DEFAULT_FORM: Literal["product", "compound"] = "product"

    # Compound JS normalizer: union -> |q u r|, sum -> |q| + |r|
    QR_NORMALIZER: Literal["union", "sum"] = "union"

    # Output
    TRIVERGE_PRECISION: int = 17

    # Matrix batch
    MATRIX_WORKERS: int = 4

    # Oracle working precision (decimal digits)
    ORACLE_DPS: int = 50

    # Tokenizer
    TOKEN_LOWERCASE: bool = True

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
