# app/core/orquestrador.py
"""
Orquestração do estudo de convergência na casca fina.

Fluxo de `executar_estudo_convergencia`:
    1. Fase 1: referência na esfera, uma por caminho de Wiener.
    2. Fase 2: uma célula (ε, id_caminho) por casca, com dados R̊_ε u₀ (ou
       poluídos), forçamento R̊_ε f e o mesmo caminho da referência.
    3. Fase 3: agregação ordenada por chave, ajuste da taxa e relatório.

Células que falham viram entradas de falha rotuladas; o relatório é emitido
mesmo assim.
"""

import logging
import subprocess
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from scipy.integrate import trapezoid

from app.core.base_casca import obter_base
from app.core.excecoes import ErroConfiguracao, ErroUso
from app.core.gerenciador_tarefas import GerenciadorTarefas
from app.core.solucionador_casca import (
    ConfiguracaoSolucionadorCasca,
    TrajetoriaCasca,
    dados_iniciais_casca,
    executar_casca,
)
from app.core.solucionador_esfera import (
    LMAX_MAXIMO_NSE,
    ConfiguracaoSolucionadorEsfera,
    ModoDinamica,
    TrajetoriaEsfera,
    executar,
)
from app.ferramentas.operadores_casca import GeometriaCasca, TipoRetracao, retrair
from app.ferramentas.operadores_esfera import (
    GradeEsfera,
    SolenoidalEspectral,
    autovalores_stokes,
    obter_grade,
)
from app.ferramentas.ruido import CaminhoWiener, ModeloRuido, amostrar_caminho, elevar_ruido

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

# Taxas abaixo disso são tratadas como ausência de convergência
LIMIAR_TAXA = 0.05

AVISO_MODO_CONVERGENCIA = (
    "A teoria garante convergência em lei ao longo de subsequências; este estudo acopla casca e "
    "esfera ao mesmo caminho de Wiener e mede o erro trajetória a trajetória, um teste mais forte."
)
AVISO_UNICIDADE = (
    "Não há unicidade garantida para soluções martingais na casca; cada trajetória numérica é uma "
    "realização consistente, não a solução."
)

Modo = Tuple[int, int, float]


# --- Configuração ---


class ConfiguracaoRuido(BaseModel):
    """
    Ruído do estudo: N campos g^j, um por modo listado (ou N modos padrão).

    Com `modes` informado, N omitido é deduzido da lista; N explícito precisa
    coincidir com o número de modos.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    N: int = Field(default=3, ge=0, description="Número de movimentos brownianos.")
    modos: List[Modo] = Field(
        default_factory=list, alias="modes", description="Lista (l, m, amplitude); vazia usa os N modos padrão."
    )
    semente: Optional[int] = Field(
        default=None, ge=0, alias="seed", description="Semente própria do ruído; None usa a do estudo."
    )
    poluicao: bool = Field(default=False, description="Eleva o ruído com a flutuação ε·η.")

    @model_validator(mode="after")
    def _modos_consistentes(self) -> "ConfiguracaoRuido":
        if not self.modos or len(self.modos) == self.N:
            return self
        if "N" in self.model_fields_set:
            raise ValueError(f"N={self.N} difere do número de modos listados ({len(self.modos)}).")
        self.N = len(self.modos)
        return self


class ConfiguracaoEstudo(BaseModel):
    """
    Configuração validada de um estudo (aceita as chaves externas em inglês).

    Examples:
        >>> ConfiguracaoEstudo.model_validate({"eps_list": [0.4, 0.2, 0.1]}).lista_eps
        [0.4, 0.2, 0.1]
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    lista_eps: List[float] = Field(
        default_factory=lambda: [0.4, 0.2, 0.1, 0.05], alias="eps_list", description="Espessuras, decrescentes."
    )
    lmax: int = Field(default=10, ge=1, description="Truncamento espectral.")
    nr: int = Field(default=6, ge=5, description="Nós radiais de Gauss–Legendre.")
    nu: float = Field(default=0.1, gt=0, description="Viscosidade ν.")
    dt: float = Field(default=1e-3, gt=0, description="Passo de tempo.")
    t_final: float = Field(default=0.5, ge=0, description="Horizonte T.")
    modo: ModoDinamica = Field(default=ModoDinamica.STOKES, alias="mode", description="STOKES ou NSE.")
    estocastico: bool = Field(default=False, alias="stochastic", description="Liga o ruído aditivo.")
    caminhos: int = Field(default=1, ge=1, alias="paths", description="Caminhos de Monte Carlo.")
    semente: int = Field(default=0, ge=0, alias="seed", description="Semente global.")
    momento_p: float = Field(default=2.0, ge=2, alias="moment_p", description="Expoente do diagnóstico de momentos.")
    saida: str = Field(default="resultados", alias="out", description="Diretório de saída.")
    passos_por_amostra: int = Field(default=10, ge=1, description="Intervalo de amostragem das trajetórias.")
    poluicao_inicial: float = Field(default=0.0, description="Peso da flutuação ε·η nos dados iniciais.")
    auto_consistencia: bool = Field(default=False, description="Substitui a casca pela elevação exata da esfera.")
    modos_iniciais: List[Modo] = Field(
        default_factory=lambda: [(1, 0, 1.0), (2, 1, 0.5), (3, -2, 0.25)], description="u₀ como soma de modos."
    )
    modos_forcamento: List[Modo] = Field(default_factory=list, description="f como soma de modos.")
    ruido: ConfiguracaoRuido = Field(default_factory=ConfiguracaoRuido, description="Modelo de ruído.")

    @field_validator("lista_eps")
    @classmethod
    def _eps_validos(cls, valores: List[float]) -> List[float]:
        if not valores:
            raise ValueError("eps_list não pode ser vazia")
        if any(not (0.0 < e < 0.5) for e in valores):
            raise ValueError("todos os ε devem estar em (0, 1/2)")
        if any(b >= a for a, b in zip(valores, valores[1:])):
            raise ValueError("eps_list deve ser estritamente decrescente")
        return valores

    @model_validator(mode="after")
    def _limites_do_modo(self) -> "ConfiguracaoEstudo":
        if self.modo is ModoDinamica.NSE and self.lmax > LMAX_MAXIMO_NSE:
            raise ValueError(f"modo NSE limitado a lmax ≤ {LMAX_MAXIMO_NSE}")
        for l, m, _ in self.modos_iniciais + self.modos_forcamento + self.ruido.modos:
            if not (1 <= l <= self.lmax and abs(m) <= l):
                raise ValueError(f"modo (l={l}, m={m}) fora do truncamento lmax={self.lmax}")
        return self

    def para_dict_externo(self) -> Dict[str, Any]:
        """Campos do estudo com as chaves externas, sem o diretório de saída."""
        return self.model_dump(mode="json", by_alias=True, exclude={"saida"})


def carregar_configuracao_estudo(dados: Dict[str, Any]) -> ConfiguracaoEstudo:
    """
    Valida um dicionário de configuração.

    Raises:
        ErroConfiguracao: Com a mensagem de validação do pydantic.
    """
    try:
        return ConfiguracaoEstudo.model_validate(dados)
    except ValidationError as e:
        raise ErroConfiguracao(f"Configuração de estudo inválida: {e}", type(e).__name__) from e


# --- Relatório ---


class AjusteTaxa(BaseModel):
    taxa: Optional[float] = Field(default=None, description="Expoente ajustado em erro ~ C·ε^taxa.")
    residuo: Optional[float] = Field(default=None, description="Resíduo RMS do ajuste log-log.")
    pontos: int = Field(description="Número de pares (ε, erro) usados.")
    convergente: bool = Field(default=False, description="Falso quando a taxa é ≈ 0 ou o ajuste foi pulado.")
    aviso: Optional[str] = Field(default=None, description="Motivo de ajuste pulado ou sem convergência.")


class ResultadoEps(BaseModel):
    eps: float
    caminhos_ok: int = Field(description="Caminhos concluídos sem falha.")
    erro_sup_l2: Optional[float] = Field(default=None, description="Média em caminhos de sup_t ‖α_ε − u‖_{L²}.")
    erro_l2_integrado: Optional[float] = Field(
        default=None, description="(E ∫‖α_ε − u‖² dt)^{1/2}, o erro em L²(Ω × [0,T] × S²)."
    )
    erro_sup_dainv: Optional[float] = Field(default=None, description="Média de sup_t ‖α_ε − u‖_{D(A⁻¹)}.")
    energia_flutuacao_integrada: Optional[float] = Field(
        default=None, description="Média de ν∫‖curl β̃_ε‖² dt."
    )
    energia_flutuacao_max: Optional[float] = Field(default=None, description="Média de sup_t ‖β̃_ε‖².")
    momento: Optional[float] = Field(default=None, description="Média de sup_t ‖β̃_ε‖^p / ε^{p/2}.")
    metricas_consistentes: bool = Field(default=True, description="sup D(A⁻¹) ≤ sup L²/2 em todos os caminhos.")
    falhas: List[Dict[str, Any]] = Field(default_factory=list)


class RelatorioConvergencia(BaseModel):
    """Relatório determinístico do estudo; `linhas_erro` vai para errors.csv."""

    configuracao: Dict[str, Any]
    metadados: Dict[str, Any]
    por_eps: List[ResultadoEps]
    ajuste: AjusteTaxa
    ajuste_integrado: AjusteTaxa
    erros_decrescentes: bool
    linhas_erro: List[Dict[str, float]] = Field(default_factory=list, exclude=True)

    @property
    def possui_falhas(self) -> bool:
        return any(resultado.falhas for resultado in self.por_eps)


# --- Ajuste de taxa ---


def ajustar_taxa(eps: List[float], erros: List[float]) -> AjusteTaxa:
    """
    Ajuste de mínimos quadrados de log(erro) = taxa·log(ε) + c.

    Raises:
        ErroUso: Menos de três pares.

    Examples:
        >>> round(ajustar_taxa([0.4, 0.2, 0.1], [0.4, 0.2, 0.1]).taxa, 12)
        1.0
    """
    if len(eps) != len(erros):
        raise ErroUso("Listas de ε e de erros com tamanhos diferentes.")
    if len(eps) < 3:
        raise ErroUso(f"Ajuste de taxa exige ≥ 3 pontos (recebidos {len(eps)}).", "PontosInsuficientes")
    eps_arr = np.asarray(eps, dtype=float)
    erros_arr = np.asarray(erros, dtype=float)
    if np.any(~np.isfinite(erros_arr)) or np.any(erros_arr <= 0) or np.any(eps_arr <= 0):
        aviso = "Ajuste pulado: erros não positivos ou não finitos."
        logger.warning(aviso)
        return AjusteTaxa(pontos=len(eps), aviso=aviso)

    x, y = np.log(eps_arr), np.log(erros_arr)
    taxa, intercepto = np.polyfit(x, y, 1)
    residuo = float(np.sqrt(np.mean((y - (taxa * x + intercepto)) ** 2)))
    convergente = bool(taxa >= LIMIAR_TAXA)
    aviso = None if convergente else "Sem convergência: taxa ajustada ≈ 0."
    if aviso:
        logger.warning(f"{aviso} (taxa={taxa:.3e})")
    return AjusteTaxa(taxa=float(taxa), residuo=residuo, pontos=len(eps), convergente=convergente, aviso=aviso)


# --- Células ---


def campo_de_modos(grade: GradeEsfera, modos: List[Modo]) -> SolenoidalEspectral:
    """Soma de modos amp·curl′Y_{l,m}."""
    psi = np.zeros(grade.numero_coeficientes)
    for l, m, amplitude in modos:
        psi += SolenoidalEspectral.modo(grade, l, m, amplitude).psi
    return SolenoidalEspectral(grade, psi)


def _modelo_ruido(config: ConfiguracaoEstudo, grade: GradeEsfera) -> Optional[ModeloRuido]:
    if not config.estocastico:
        return None
    if config.ruido.modos:
        return ModeloRuido.de_modos(grade, config.ruido.modos)
    return ModeloRuido.padrao(grade, config.ruido.N)


def _caminho(config: ConfiguracaoEstudo, modelo: Optional[ModeloRuido], id_caminho: int) -> Optional[CaminhoWiener]:
    if modelo is None:
        return None
    semente = config.semente if config.ruido.semente is None else config.ruido.semente
    passos = int(round(config.t_final / config.dt))
    return amostrar_caminho(semente, id_caminho, modelo.N, config.dt, passos)


def executar_referencia_esfera(config: ConfiguracaoEstudo, id_caminho: int) -> TrajetoriaEsfera:
    """Trajetória de referência na esfera; id_caminho só importa no caso estocástico."""
    grade = obter_grade(config.lmax)
    modelo = _modelo_ruido(config, grade)
    forcamento = campo_de_modos(grade, config.modos_forcamento) if config.modos_forcamento else None
    solucionador = ConfiguracaoSolucionadorEsfera(
        nu=config.nu,
        dt=config.dt,
        t_final=config.t_final,
        lmax=config.lmax,
        forcamento=forcamento,
        ruido=modelo,
        modo=config.modo,
        passos_por_amostra=config.passos_por_amostra,
    )
    u0 = campo_de_modos(grade, config.modos_iniciais)
    return executar(solucionador, u0, _caminho(config, modelo, id_caminho))


def executar_celula_casca(config: ConfiguracaoEstudo, eps: float, id_caminho: int) -> TrajetoriaCasca:
    """Execução na casca de espessura ε com dados R̊_ε u₀, forçamento R̊_ε f e o caminho id_caminho."""
    grade = obter_grade(config.lmax)
    geometria = GeometriaCasca(eps, config.nr, grade)
    base = obter_base(geometria)
    modelo = _modelo_ruido(config, grade)
    ruido = elevar_ruido(modelo, geometria, config.ruido.poluicao) if modelo is not None else None
    forcamento = None
    if config.modos_forcamento:
        forcamento = retrair(TipoRetracao.R_ANEL, campo_de_modos(grade, config.modos_forcamento), geometria)
    solucionador = ConfiguracaoSolucionadorCasca(
        geometria=geometria,
        nu=config.nu,
        dt=config.dt,
        t_final=config.t_final,
        forcamento=forcamento,
        ruido=ruido,
        modo=config.modo,
        passos_por_amostra=config.passos_por_amostra,
    )
    u0 = dados_iniciais_casca(base, campo_de_modos(grade, config.modos_iniciais), config.poluicao_inicial)
    return executar_casca(solucionador, u0, _caminho(config, modelo, id_caminho))


def _comparar(
    config: ConfiguracaoEstudo, eps: float, id_caminho: int, esfera: TrajetoriaEsfera
) -> Dict[str, Any]:
    """Executa a casca (ou a elevação exata) e mede α_ε contra a referência."""
    grade = obter_grade(config.lmax)
    autovalores = autovalores_stokes(config.lmax)
    inverso = np.zeros_like(autovalores)
    inverso[1:] = 1.0 / autovalores[1:]

    if config.auto_consistencia:
        base = obter_base(GeometriaCasca(eps, config.nr, grade))
        alphas = [base.traco(base.retrair_coeficientes(u)) for u in esfera.estados]
        energia_media = [eps * float(np.sum(autovalores * u.psi**2)) for u in esfera.estados]
        energia_flutuacao = [0.0] * len(alphas)
        rot_flutuacao = [0.0] * len(alphas)
        tempos = esfera.tempos
    else:
        casca = executar_celula_casca(config, eps, id_caminho)
        alphas, tempos = casca.alphas, casca.tempos
        energia_media = casca.energia_media
        energia_flutuacao = casca.energia_flutuacao
        rot_flutuacao = casca.rotacional_flutuacao

    diferencas = np.stack([a.psi - u.psi for a, u in zip(alphas, esfera.estados)])
    erro_l2 = np.sqrt(np.sum(autovalores * diferencas**2, axis=1))
    erro_dainv = np.sqrt(np.sum(inverso * diferencas**2, axis=1))
    energia_esfera = esfera.energias()
    flutuacao = np.asarray(energia_flutuacao)

    linhas = [
        {
            "eps": eps,
            "path_id": id_caminho,
            "t": float(t),
            "err_l2": float(e2),
            "err_dainv": float(ed),
            "energy_sphere": float(es),
            "energy_mean": float(em),
            "energy_fluct": float(ef),
        }
        for t, e2, ed, es, em, ef in zip(tempos, erro_l2, erro_dainv, energia_esfera, energia_media, flutuacao)
    ]
    p = config.momento_p
    return {
        "erro_sup_l2": float(np.max(erro_l2)),
        "erro_l2_quadrado_integrado": float(trapezoid(erro_l2**2, tempos)) if len(tempos) > 1 else 0.0,
        "erro_sup_dainv": float(np.max(erro_dainv)),
        "energia_flutuacao_integrada": config.nu * float(trapezoid(rot_flutuacao, tempos)) if len(tempos) > 1 else 0.0,
        "energia_flutuacao_max": float(np.max(flutuacao)),
        "momento": float(np.max(flutuacao ** (p / 2))) / eps ** (p / 2),
        "linhas": linhas,
    }


def _agregar_eps(eps: float, resultados: List[Dict[str, Any]]) -> ResultadoEps:
    falhas = [{"id_caminho": id_caminho, **r["erro"]} for id_caminho, r in resultados if r["erro"]]
    dados = [r["dados"] for _, r in resultados if r["erro"] is None]
    if not dados:
        return ResultadoEps(eps=eps, caminhos_ok=0, falhas=falhas)

    def media(chave: str) -> float:
        return float(np.mean([d[chave] for d in dados]))

    return ResultadoEps(
        eps=eps,
        caminhos_ok=len(dados),
        erro_sup_l2=media("erro_sup_l2"),
        erro_l2_integrado=float(np.sqrt(media("erro_l2_quadrado_integrado"))),
        erro_sup_dainv=media("erro_sup_dainv"),
        energia_flutuacao_integrada=media("energia_flutuacao_integrada"),
        energia_flutuacao_max=media("energia_flutuacao_max"),
        momento=media("momento"),
        metricas_consistentes=all(d["erro_sup_dainv"] <= 0.5 * d["erro_sup_l2"] + 1e-15 for d in dados),
        falhas=falhas,
    )


def _hash_git() -> str:
    try:
        saida = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=5, check=True)
        return saida.stdout.strip()
    except Exception:
        return "desconhecido"


def _ajuste_seguro(eps: List[float], erros: List[Optional[float]]) -> AjusteTaxa:
    pares = [(e, v) for e, v in zip(eps, erros) if v is not None]
    if len(pares) < 3:
        aviso = f"Ajuste pulado: apenas {len(pares)} valores de ε concluídos."
        logger.warning(aviso)
        return AjusteTaxa(pontos=len(pares), aviso=aviso)
    return ajustar_taxa([e for e, _ in pares], [v for _, v in pares])


async def executar_estudo_convergencia(
    config: ConfiguracaoEstudo, max_trabalhadores: int = 2
) -> RelatorioConvergencia:
    """
    Executa a varredura em ε e monta o relatório de convergência.

    Args:
        config: Configuração validada.
        max_trabalhadores: Células simultâneas; não altera nenhum número do relatório.

    Returns:
        RelatorioConvergencia com linhas_erro preenchidas.

    Raises:
        ErroSimulacao: Falha na referência da esfera (sem ela não há estudo).
    """
    gerenciador = GerenciadorTarefas(max_trabalhadores)
    caminhos = list(range(config.caminhos if config.estocastico else 1))

    logger.info(f"Fase 1: referência na esfera ({len(caminhos)} caminho(s))")
    celulas_esfera = {(0.0, c): (lambda c=c: executar_referencia_esfera(config, c)) for c in caminhos}
    referencias = await gerenciador.executar_celulas(celulas_esfera)
    for chave, resultado in referencias.items():
        if resultado["erro"]:
            erro = resultado["erro"]
            raise ErroConfiguracao(f"Referência da esfera falhou em {chave}: {erro['erro']}", erro["tipo"])

    logger.info(f"Fase 2: {len(config.lista_eps)} espessura(s) × {len(caminhos)} caminho(s)")
    celulas_casca = {
        (eps, c): (lambda eps=eps, c=c: _comparar(config, eps, c, referencias[(0.0, c)]["dados"]))
        for eps in config.lista_eps
        for c in caminhos
    }
    resultados = await gerenciador.executar_celulas(celulas_casca)

    logger.info("Fase 3: agregação e ajuste de taxa")
    por_eps = [
        _agregar_eps(eps, [(c, resultados[(eps, c)]) for c in caminhos]) for eps in config.lista_eps
    ]
    linhas_erro = [
        linha
        for eps in config.lista_eps
        for c in caminhos
        if resultados[(eps, c)]["erro"] is None
        for linha in resultados[(eps, c)]["dados"]["linhas"]
    ]
    erros_sup = [r.erro_sup_l2 for r in por_eps]
    concluidos = [e for e in erros_sup if e is not None]
    decrescentes = len(concluidos) == len(erros_sup) and all(b < a for a, b in zip(concluidos, concluidos[1:]))

    relatorio = RelatorioConvergencia(
        configuracao=config.para_dict_externo(),
        metadados={
            "hash_git": _hash_git(),
            "semente": config.semente,
            "caminhos": len(caminhos),
            "tolerancias": {"limiar_taxa": LIMIAR_TAXA},
            "modo_convergencia": AVISO_MODO_CONVERGENCIA,
            "unicidade": AVISO_UNICIDADE,
            "auto_consistencia": config.auto_consistencia,
        },
        por_eps=por_eps,
        ajuste=_ajuste_seguro(config.lista_eps, erros_sup),
        ajuste_integrado=_ajuste_seguro(config.lista_eps, [r.erro_l2_integrado for r in por_eps]),
        erros_decrescentes=decrescentes,
        linhas_erro=linhas_erro,
    )
    estatisticas = gerenciador.obter_estatisticas()
    logger.info(f"Estudo concluído: {estatisticas['concluidas']} células, {estatisticas['falhas']} falha(s)")
    return relatorio
