# app/core/suite_propriedades.py
"""
Suíte de propriedades: identidades de operadores, desigualdades, adjunções,
sanidade da dinâmica e do ruído, sempre com sementes fixas.

Cada grupo é uma função `_verificar_<grupo>(contexto)` registrada em
MAPEAMENTO_VERIFICACOES; `executar_suite` resolve o seletor, executa os grupos
e devolve uma tabela de ResultadoVerificacao.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.core.base_casca import obter_base
from app.core.excecoes import ErroSimulacao, ErroUso
from app.core.solucionador_casca import (
    ConfiguracaoSolucionadorCasca,
    FormaNaoLinear,
    aplicar_stokes_eps,
    dados_iniciais_casca,
    executar_casca,
    residuo_identidade_modificada,
    residuos_contorno,
    termo_nao_linear_casca,
)
from app.core.solucionador_esfera import (
    ConfiguracaoSolucionadorEsfera,
    ModoDinamica,
    executar,
    razao_neutralidade,
)
from app.ferramentas.operadores_casca import (
    CampoEscalarCasca,
    CampoVetorialCasca,
    GeometriaCasca,
    TipoDiferencial,
    TipoMedia,
    TipoProdutoCasca,
    TipoRetracao,
    campo_de_potenciais,
    campo_solenoidal_aleatorio,
    decompor,
    diferencial_casca,
    media,
    norma_casca,
    norma_lp,
    produto_interno_casca,
    residuos_h_eps,
    retrair,
    verificar_dualidade,
    verificar_dualidade_anel,
)
from app.ferramentas.operadores_esfera import (
    CampoEscalarEsfera,
    CampoTangenteEsfera,
    EscalarEspectral,
    SolenoidalEspectral,
    TipoNorma,
    TipoOperador,
    aplicar_operador,
    autovalores_stokes,
    coeficientes_aleatorios,
    indice_modo,
    norma,
    obter_grade,
    produto_interno,
    projetar_leray,
)
from app.ferramentas.ruido import (
    ModeloRuido,
    amostrar_caminho,
    elevar_ruido,
    momentos_escalonados,
    verificar_limite_coeficientes,
)

# Configura o logger para este módulo
logger = logging.getLogger(__name__)

TOLERANCIA_ALGEBRA = 1e-9
TOLERANCIA_IDENTIDADE = 1e-8
CONSTANTE_EQUIVALENCIA = 9.0 / 4.0


class ResultadoVerificacao(BaseModel):
    """Linha da tabela de resultados."""

    nome: str = Field(description="Identificador da verificação.")
    grupo: str = Field(description="Grupo do seletor que a executou.")
    passou: bool = Field(description="Resultado da verificação.")
    valor: Optional[float] = Field(default=None, description="Maior resíduo ou razão observada.")
    limite: Optional[float] = Field(default=None, description="Limite aplicado (None quando só é relatado).")
    detalhe: str = Field(default="", description="Contexto adicional ou mensagem de erro.")


@dataclass(frozen=True)
class ContextoSuite:
    """Parâmetros compartilhados pelos grupos."""

    casos: int = 200
    semente: int = 0
    momento_p: float = 4.0
    lmax: int = 10
    nr: int = 8
    lista_eps: Tuple[float, ...] = (0.4, 0.2, 0.1, 0.05)

    def rng(self, *chave: int) -> np.random.Generator:
        return np.random.default_rng([self.semente, *chave])

    def geometria(self, eps: float, lmax: Optional[int] = None, nr: Optional[int] = None) -> GeometriaCasca:
        return GeometriaCasca(eps, self.nr if nr is None else nr, obter_grade(self.lmax if lmax is None else lmax))


def _resultado(
    nome: str,
    grupo: str,
    valor: float,
    limite: Optional[float],
    passou: Optional[bool] = None,
    detalhe: str = "",
) -> ResultadoVerificacao:
    valor = float(valor)
    finito = bool(np.isfinite(valor))
    if passou is None:
        passou = finito and (limite is None or valor <= limite)
    return ResultadoVerificacao(
        nome=nome,
        grupo=grupo,
        passou=bool(passou),
        valor=valor if finito else None,
        limite=limite,
        detalhe=detalhe,
    )


def _maximo(*arrays: np.ndarray) -> float:
    return max(float(np.max(np.abs(a))) for a in arrays)


def _distancia_tangente(a: CampoTangenteEsfera, b: CampoTangenteEsfera) -> float:
    return _maximo(a.u_lambda - b.u_lambda, a.u_phi - b.u_phi)


def _escalar_esfera_aleatorio(grade, rng: np.random.Generator) -> CampoEscalarEsfera:
    return CampoEscalarEsfera(grade, grade.sintetizar_valores(coeficientes_aleatorios(grade, rng, decaimento=1.0)))


def _tangente_aleatorio(grade, rng: np.random.Generator) -> CampoTangenteEsfera:
    chi = coeficientes_aleatorios(grade, rng, lmin=1, decaimento=1.0)
    psi = coeficientes_aleatorios(grade, rng, lmin=1, decaimento=1.0)
    return CampoTangenteEsfera.de_potenciais(grade, chi, psi)


def _campo_base_refinado(base, coeficientes) -> CampoVetorialCasca:
    """
    Campo da base amostrado em 2·nr + 4 nós radiais.

    Os potenciais continuam polinomiais de grau nr − 1, então as condições de
    contorno seguem exatas, e a quadratura nodal dos produtos com fatores
    racionais em r cai ao nível do arredondamento.
    """
    geo = base.geometria
    fina = GeometriaCasca(geo.eps, 2 * geo.nr + 4, geo.grade)
    potenciais = base.avaliar_potenciais(*coeficientes, fina.nos_radiais)
    return campo_de_potenciais(fina, potenciais["S"], potenciais["Q"])


def _escalar_casca_aleatorio(geometria: GeometriaCasca, rng: np.random.Generator) -> CampoEscalarCasca:
    grade = geometria.grade
    coeficientes = np.stack([coeficientes_aleatorios(grade, rng, decaimento=1.0) for _ in range(geometria.nr)])
    return CampoEscalarCasca(geometria, grade.sintetizar_valores(coeficientes))


# --- algebra ---


def _verificar_algebra(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    residuos: Dict[str, float] = {}

    def registrar(nome: str, valor: float) -> None:
        residuos[nome] = max(residuos.get(nome, 0.0), float(valor))

    por_eps = max(1, contexto.casos // len(contexto.lista_eps))
    for i, eps in enumerate(contexto.lista_eps):
        geo = contexto.geometria(eps)
        grade = geo.grade
        rng = contexto.rng(1, i)
        for _ in range(por_eps):
            phi = _escalar_esfera_aleatorio(grade, rng)
            v = _tangente_aleatorio(grade, rng)
            psi = _escalar_casca_aleatorio(geo, rng)
            u = campo_solenoidal_aleatorio(geo, rng)
            w = campo_solenoidal_aleatorio(geo, rng)

            escala_phi = _maximo(phi.valores)
            escala_v = _maximo(v.u_lambda, v.u_phi)
            retraido = retrair(TipoRetracao.R_ESCALAR, phi, geo)
            registrar("m_r_identidade", _maximo(media(TipoMedia.M_ESCALAR, retraido).valores - phi.valores) / escala_phi)
            anel = retrair(TipoRetracao.R_ANEL, v, geo)
            registrar("m_anel_r_anel_identidade", _distancia_tangente(media(TipoMedia.M_ANEL, anel), v) / escala_v)
            registrar("n_til_retracao_nula", _maximo(*media(TipoMedia.N_TIL, anel).componentes) / escala_v)

            partes = decompor(u)
            norma_u = norma_casca(u)
            escala_u = _maximo(*u.componentes)
            registrar(
                "idempotencia_media",
                _maximo(*(decompor(partes.media).media - partes.media).componentes) / escala_u,
            )
            registrar("aniquilacao_flutuacao", _maximo(*decompor(partes.flutuacao).media.componentes) / escala_u)

            flutuacao_w = decompor(w).flutuacao
            ortogonal = abs(produto_interno_casca(partes.media, flutuacao_w))
            registrar("ortogonalidade_media_flutuacao", ortogonal / (norma_u * norma_casca(w)))

            pitagoras = norma_u**2 - norma_casca(partes.media) ** 2 - norma_casca(partes.flutuacao) ** 2
            registrar("pitagoras", abs(pitagoras) / norma_u**2)

            escala_media = abs(norma_casca(partes.media) ** 2 - eps * norma(partes.traco) ** 2)
            registrar("escala_media_traco", escala_media / norma_u**2)
            registrar(
                "escala_r_escalar",
                abs(norma_casca(retraido) ** 2 - eps * norma(phi) ** 2) / (eps * norma(phi) ** 2),
            )
            registrar("escala_r_anel", abs(norma_casca(anel) ** 2 - eps * norma(v) ** 2) / (eps * norma(v) ** 2))

            escala_dual = norma_casca(psi) * norma(phi) / np.sqrt(eps)
            registrar("dualidade_escalar", verificar_dualidade(psi, phi) / escala_dual)
            registrar("dualidade_anel", verificar_dualidade_anel(u, v) * np.sqrt(eps) / (norma_u * norma(v)))

            momento_r = np.stack(
                [np.einsum("k,kij->ij", geo.pesos_r1, c) for c in (partes.flutuacao.u_lambda, partes.flutuacao.u_phi)]
            )
            registrar("momento_r_flutuacao", _maximo(momento_r) / (eps * escala_u))

            limitacao = norma(media(TipoMedia.M_ESCALAR, psi)) ** 2 - norma_casca(psi) ** 2 / eps
            registrar("limitacao_m_eps", max(limitacao, 0.0) / (norma_casca(psi) ** 2 / eps))

    detalhe = f"{por_eps} casos por ε em {list(contexto.lista_eps)}"
    return [_resultado(nome, "algebra", valor, TOLERANCIA_ALGEBRA, detalhe=detalhe) for nome, valor in residuos.items()]


# --- desigualdades, poincare, ladyzhenskaya ---


def _razao_poincare(u: CampoVetorialCasca) -> float:
    flutuacao = decompor(u).flutuacao
    rotacional = norma_casca(diferencial_casca(TipoDiferencial.ROT3, flutuacao))
    return norma_casca(flutuacao) / (2.0 * u.geometria.eps * rotacional)


def _verificar_poincare(
    contexto: ContextoSuite, lista_eps: Sequence[float] = (0.4,), grupo: str = "poincare"
) -> List[ResultadoVerificacao]:
    prefixo = "poincare" if grupo == "poincare" else f"poincare_{grupo}"
    resultados = []
    quantidade = max(1, contexto.casos // 2)
    for i, eps in enumerate(lista_eps):
        geo = contexto.geometria(eps)
        rng = contexto.rng(2, i)
        maior = max(_razao_poincare(campo_solenoidal_aleatorio(geo, rng)) for _ in range(quantidade))
        resultados.append(
            _resultado(f"{prefixo}_eps_{eps:g}", grupo, maior, 1.0 + 1e-6, detalhe=f"{quantidade} campos em V_ε")
        )
    return resultados


def _verificar_ladyzhenskaya(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    """Razão ‖Ñu‖²_{L³}/(ε‖Ñu‖²_V) por ε; a constante é relatada, não imposta."""
    quantidade = max(1, contexto.casos // 10)
    razoes = []
    for i, eps in enumerate(contexto.lista_eps):
        geo = contexto.geometria(eps)
        rng = contexto.rng(3, i)
        maior = 0.0
        for _ in range(quantidade):
            flutuacao = decompor(campo_solenoidal_aleatorio(geo, rng)).flutuacao
            rotacional = norma_casca(diferencial_casca(TipoDiferencial.ROT3, flutuacao))
            maior = max(maior, norma_lp(flutuacao, 3) ** 2 / (eps * rotacional**2))
        razoes.append(maior)
    constante = max(razoes)
    detalhe = "razões por ε: " + ", ".join(f"{e:g}: {r:.4e}" for e, r in zip(contexto.lista_eps, razoes))
    return [
        _resultado(
            "ladyzhenskaya_constante",
            "ladyzhenskaya",
            constante,
            None,
            passou=bool(np.all(np.isfinite(razoes))),
            detalhe=detalhe,
        )
    ]


def _verificar_desigualdades(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    quantidade = max(1, contexto.casos // 2)
    equivalencia_min, equivalencia_max = np.inf, 0.0
    divisao_rot = 0.0
    razao_media_rot = 0.0
    gradientes = []
    for i, eps in enumerate(contexto.lista_eps):
        geo = contexto.geometria(eps)
        rng = contexto.rng(4, i)
        for _ in range(quantidade):
            u = campo_solenoidal_aleatorio(geo, rng)
            razao = produto_interno_casca(u, u, TipoProdutoCasca.PONDERADO_R) / norma_casca(u) ** 2
            equivalencia_min = min(equivalencia_min, razao)
            equivalencia_max = max(equivalencia_max, razao)

            partes = decompor(u)
            rot_u = diferencial_casca(TipoDiferencial.ROT3, u)
            rot_media = diferencial_casca(TipoDiferencial.ROT3, partes.media)
            rot_flutuacao = diferencial_casca(TipoDiferencial.ROT3, partes.flutuacao)
            total = produto_interno_casca(rot_u, rot_u, TipoProdutoCasca.PONDERADO_R)
            soma = produto_interno_casca(rot_media, rot_media, TipoProdutoCasca.PONDERADO_R) + produto_interno_casca(
                rot_flutuacao, rot_flutuacao, TipoProdutoCasca.PONDERADO_R
            )
            divisao_rot = max(divisao_rot, abs(total - soma) / total)
            razao_media_rot = max(razao_media_rot, norma_casca(rot_media) ** 2 / norma_casca(rot_u) ** 2)

        phi = _escalar_esfera_aleatorio(geo.grade, contexto.rng(5))
        gradiente = diferencial_casca(TipoDiferencial.GRAD3, retrair(TipoRetracao.R_ESCALAR, phi, geo))
        gradientes.append(norma_casca(gradiente) ** 2 / eps)

    resultados = [
        _resultado(
            "equivalencia_normas",
            "desigualdades",
            equivalencia_max,
            CONSTANTE_EQUIVALENCIA * (1 + 1e-12),
            passou=equivalencia_min >= 1.0 - 1e-12 and equivalencia_max <= CONSTANTE_EQUIVALENCIA * (1 + 1e-12),
            detalhe=f"razões em [{equivalencia_min:.6f}, {equivalencia_max:.6f}]",
        ),
        _resultado("divisao_energia_rotacional", "desigualdades", divisao_rot, TOLERANCIA_IDENTIDADE),
        _resultado("rotacional_da_media", "desigualdades", razao_media_rot, CONSTANTE_EQUIVALENCIA),
        _resultado(
            "escala_gradiente_retracao",
            "desigualdades",
            max(gradientes) / min(gradientes),
            2.0,
            detalhe="max/min de ‖∇R_ε ψ‖²/ε ao longo de ε",
        ),
    ]
    resultados += _verificar_poincare(contexto, contexto.lista_eps, grupo="desigualdades")
    return resultados


# --- identidades ---


def _verificar_identidades(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    resultados = []
    rng = contexto.rng(6)

    geo = contexto.geometria(0.1)
    grade = geo.grade
    phi = _escalar_esfera_aleatorio(grade, rng)
    laplaciano = diferencial_casca(TipoDiferencial.LAPLACIANO3, retrair(TipoRetracao.R_ESCALAR, phi, geo))
    beltrami = aplicar_operador(TipoOperador.LAPLACE_BELTRAMI, phi).valores
    esperado = beltrami[None, :, :] / geo.nos_radiais[:, None, None] ** 3
    resultados.append(
        _resultado(
            "laplaciano_retracao",
            "identidades",
            _maximo(laplaciano.valores - esperado) / _maximo(esperado),
            TOLERANCIA_IDENTIDADE,
        )
    )

    grade_fina = obter_grade(31)
    maior = 0.0
    for l in range(1, 21):
        for m in (-l, 0, l):
            coef = np.zeros(grade_fina.numero_coeficientes)
            coef[indice_modo(l, m)] = 1.0
            Y = grade_fina.sintetizar_valores(coef)
            resultado = aplicar_operador(TipoOperador.LAPLACE_BELTRAMI, CampoEscalarEsfera(grade_fina, Y)).valores
            maior = max(maior, _maximo(resultado + l * (l + 1) * Y) / (l * (l + 1) * _maximo(Y)))
    resultados.append(_resultado("autovalores_beltrami_l20", "identidades", maior, TOLERANCIA_IDENTIDADE))

    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1, decaimento=1.0))
    anel = retrair(TipoRetracao.R_ANEL, u, geo)
    divergencia = diferencial_casca(TipoDiferencial.DIV3, anel)
    resultados.append(
        _resultado(
            "divergencia_retracao",
            "identidades",
            norma_casca(divergencia) / norma_casca(anel),
            TOLERANCIA_ALGEBRA,
        )
    )

    cos = np.broadcast_to(grade.cos_colatitude[None, :, None], geo.forma)
    sen = np.broadcast_to(grade.sen_colatitude[None, :, None], geo.forma)
    constante = CampoVetorialCasca(geo, cos, -sen, np.zeros(geo.forma))
    rot_constante = diferencial_casca(TipoDiferencial.ROT3, constante)
    resultados.append(
        _resultado("rotacional_campo_constante", "identidades", _maximo(*rot_constante.componentes), TOLERANCIA_ALGEBRA)
    )

    geo_02 = contexto.geometria(0.2)
    um = CampoEscalarCasca(geo_02, np.ones(geo_02.forma))
    resultados.append(
        _resultado(
            "media_constante",
            "identidades",
            _maximo(media(TipoMedia.M_ESCALAR, um).valores - 1.1),
            1e-12,
        )
    )

    v = _tangente_aleatorio(grade, rng)
    projetado = projetar_leray(v)
    residuo_leray = _maximo(projetar_leray(projetado.sintetizar()).psi - projetado.psi) / _maximo(projetado.psi)
    resultados.append(_resultado("leray_idempotente", "identidades", residuo_leray, TOLERANCIA_ALGEBRA))

    parseval = abs(produto_interno(u, u) - produto_interno(u.sintetizar(), u.sintetizar())) / produto_interno(u, u)
    resultados.append(_resultado("parseval_esfera", "identidades", parseval, TOLERANCIA_ALGEBRA))

    base = obter_base(geo)
    resultados.append(_resultado("contorno_base_casca", "identidades", base.residuo_contorno(), TOLERANCIA_IDENTIDADE))
    return resultados


# --- adjuncao ---


def _verificar_adjuncao(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    resultados = []
    rng = contexto.rng(7)
    grade = obter_grade(contexto.lmax)

    psi = EscalarEspectral(grade, coeficientes_aleatorios(grade, rng, decaimento=1.0))
    v = _tangente_aleatorio(grade, rng)
    esquerdo = produto_interno(aplicar_operador(TipoOperador.ROTACIONAL_CORRENTE, psi), v)
    direito = produto_interno(psi, aplicar_operador(TipoOperador.ROTACIONAL_ESCALAR, v))
    escala = norma(psi.sintetizar()) * norma(v)
    resultados.append(_resultado("rotacional_adjunto_esfera", "adjuncao", abs(esquerdo - direito) / escala, TOLERANCIA_IDENTIDADE))

    esquerdo = produto_interno(aplicar_operador(TipoOperador.GRADIENTE, psi), v)
    direito = -produto_interno(psi, aplicar_operador(TipoOperador.DIVERGENCIA, v))
    resultados.append(_resultado("gradiente_divergencia_esfera", "adjuncao", abs(esquerdo - direito) / escala, TOLERANCIA_IDENTIDADE))

    u = SolenoidalEspectral(grade, coeficientes_aleatorios(grade, rng, lmin=1, decaimento=1.0))
    stokes = u.aplicar_stokes().sintetizar()
    de_rham = aplicar_operador(TipoOperador.LAPLACE_DE_RHAM, u)
    diferenca = _maximo(stokes.u_lambda + de_rham.u_lambda, stokes.u_phi + de_rham.u_phi)
    resultados.append(
        _resultado(
            "stokes_igual_menos_de_rham",
            "adjuncao",
            diferenca / _maximo(stokes.u_lambda, stokes.u_phi),
            TOLERANCIA_IDENTIDADE,
        )
    )

    base = obter_base(contexto.geometria(0.1))
    nativo = residuos_contorno(base.sintetizar(*base.coeficientes_aleatorios(rng)))
    resultados.append(
        _resultado("contorno_campo_base_casca", "adjuncao", max(nativo.values()), TOLERANCIA_IDENTIDADE)
    )
    campo_u = _campo_base_refinado(base, base.coeficientes_aleatorios(rng))
    campo_v = _campo_base_refinado(base, base.coeficientes_aleatorios(rng))
    A_u = aplicar_stokes_eps(campo_u)
    A_v = aplicar_stokes_eps(campo_v)
    rot_rot = produto_interno_casca(campo_u, campo_v, TipoProdutoCasca.SEMINORMA_V_EPS)
    escala = norma_casca(campo_u, TipoProdutoCasca.SEMINORMA_V_EPS) * norma_casca(campo_v, TipoProdutoCasca.SEMINORMA_V_EPS)
    resultados.append(
        _resultado(
            "rotacional_stokes_casca",
            "adjuncao",
            abs(rot_rot - produto_interno_casca(campo_u, A_v)) / escala,
            TOLERANCIA_IDENTIDADE,
        )
    )
    simetria = abs(produto_interno_casca(A_u, campo_v) - produto_interno_casca(campo_u, A_v)) / escala
    resultados.append(_resultado("stokes_casca_simetrico", "adjuncao", simetria, TOLERANCIA_IDENTIDADE))

    menos_laplaciano = diferencial_casca(TipoDiferencial.LAPLACIANO3, campo_u) * -1.0
    energia = norma_casca(campo_u, TipoProdutoCasca.SEMINORMA_V_EPS) ** 2
    resultados.append(
        _resultado(
            "laplaciano_energia_casca",
            "adjuncao",
            abs(produto_interno_casca(menos_laplaciano, campo_u) - energia) / energia,
            TOLERANCIA_IDENTIDADE,
        )
    )
    return resultados


# --- dinamica ---


def _verificar_dinamica(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    resultados = []
    rng = contexto.rng(8)
    nu = 0.1

    grade = obter_grade(4)
    config = ConfiguracaoSolucionadorEsfera(nu=nu, dt=1e-3, t_final=1.0, lmax=4, modo=ModoDinamica.NSE, passos_por_amostra=1000)
    trajetoria = executar(config, SolenoidalEspectral.modo(grade, 2, 1, 1.0))
    decaimento = np.sqrt(trajetoria.energias()[-1] / trajetoria.energias()[0])
    resultados.append(
        _resultado("decaimento_modo_unico", "dinamica", abs(decaimento - np.exp(-6 * nu)) / np.exp(-6 * nu), 1e-3)
    )

    grade_nse = obter_grade(contexto.lmax)
    u = SolenoidalEspectral(grade_nse, coeficientes_aleatorios(grade_nse, rng, lmin=1, decaimento=1.5))
    resultados.append(_resultado("neutralidade_nao_linear_esfera", "dinamica", razao_neutralidade(u, nu), 1e-9))

    u0 = SolenoidalEspectral(obter_grade(6), 0.1 * coeficientes_aleatorios(obter_grade(6), rng, lmin=1, decaimento=1.5))
    residuos = []
    for dt in (2e-3, 1e-3):
        config = ConfiguracaoSolucionadorEsfera(nu=nu, dt=dt, t_final=0.2, lmax=6, modo=ModoDinamica.NSE, passos_por_amostra=1000)
        residuos.append(abs(executar(config, u0).residuo_energia))
    razao = residuos[0] / residuos[1] if residuos[1] > 0 else np.inf
    resultados.append(
        _resultado(
            "residuo_energia_dt_metade",
            "dinamica",
            razao,
            2.5,
            passou=1.5 <= razao <= 2.5,
            detalhe=f"resíduos {residuos[0]:.3e} e {residuos[1]:.3e}",
        )
    )

    base = obter_base(contexto.geometria(0.1, lmax=6, nr=6))
    coef_u = base.coeficientes_aleatorios(rng)
    coef_v = base.coeficientes_aleatorios(rng)
    B_T, B_P = termo_nao_linear_casca(base, coef_u)
    contribuicao = abs(float(np.sum(B_T * coef_u[0]) + np.sum(B_P * coef_u[1])))
    escala = np.sqrt(base.energia(B_T, B_P) * base.energia(*coef_u))
    resultados.append(_resultado("neutralidade_rotacional_casca", "dinamica", contribuicao / escala, 1e-10))

    B_T, B_P = termo_nao_linear_casca(base, coef_u, coef_v, forma=FormaNaoLinear.ADVECTIVA)
    contribuicao = abs(float(np.sum(B_T * coef_v[0]) + np.sum(B_P * coef_v[1])))
    escala = np.sqrt(base.energia(B_T, B_P) * base.energia(*coef_v))
    resultados.append(_resultado("antissimetria_advectiva_casca", "dinamica", contribuicao / escala, TOLERANCIA_IDENTIDADE))

    geo = contexto.geometria(0.2, lmax=3, nr=6)
    base = obter_base(geo)
    phi = SolenoidalEspectral.modo(geo.grade, 1, 0, 1.0)
    u0 = SolenoidalEspectral(geo.grade, coeficientes_aleatorios(geo.grade, rng, lmin=1))
    residuos = []
    for dt in (2e-4, 1e-4):
        config_casca = ConfiguracaoSolucionadorCasca(geometria=geo, nu=nu, dt=dt, t_final=0.01)
        trajetoria_casca = executar_casca(config_casca, dados_iniciais_casca(base, u0, poluicao=1.0))
        residuos.append(residuo_identidade_modificada(trajetoria_casca, config_casca, phi))
    passou = residuos[1] <= residuos[0] and (residuos[1] <= 1e-12 or residuos[0] / residuos[1] >= 1.5)
    resultados.append(
        _resultado(
            "identidade_fraca_modificada",
            "dinamica",
            residuos[1],
            None,
            passou=passou,
            detalhe=f"resíduos O(dt): {residuos[0]:.3e} -> {residuos[1]:.3e}",
        )
    )

    campo_final = trajetoria_casca.campo(-1)
    h_eps = residuos_h_eps(campo_final)
    resultados.append(_resultado("invariancia_h_eps", "dinamica", max(h_eps.values()), TOLERANCIA_IDENTIDADE))
    resultados.append(
        _resultado(
            "identidade_energia_casca",
            "dinamica",
            abs(trajetoria_casca.residuo_energia),
            None,
            passou=trajetoria_casca.identidade_ok,
        )
    )
    return resultados


# --- estocastico ---


def _verificar_estocastico(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    """Ornstein–Uhlenbeck por modo no modo Stokes, com a variância discreta exata."""
    nu, dt, t_final, caminhos = 0.1, 1e-3, 0.5, 32
    grade = obter_grade(4)
    modelo = ModeloRuido.padrao(grade, 3, amplitude=0.5)
    config = ConfiguracaoSolucionadorEsfera(
        nu=nu, dt=dt, t_final=t_final, lmax=4, ruido=modelo, modo=ModoDinamica.STOKES, passos_por_amostra=50
    )
    passos = config.numero_passos
    energias_finais = []
    folgas, variacoes = [], []
    for id_caminho in range(caminhos):
        caminho = amostrar_caminho(contexto.semente, id_caminho, modelo.N, dt, passos)
        trajetoria = executar(config, SolenoidalEspectral.zero(grade), caminho)
        energias = trajetoria.energias()
        energias_finais.append(energias[-1])
        folgas.append(energias + 0.5 * np.array([livro.dissipacao for livro in trajetoria.livros]) - energias[0])
        variacoes.append(np.array([livro.variacao_quadratica for livro in trajetoria.livros]))

    autovalores = autovalores_stokes(4)
    fator = nu * autovalores * dt
    soma_geometrica = np.sum(np.exp(-2.0 * fator[:, None] * np.arange(1, passos + 1)), axis=1)
    esperado = float(np.sum(autovalores * np.sum(modelo.matriz() ** 2, axis=0) * dt * soma_geometrica))
    media_mc = float(np.mean(energias_finais))
    sigma = float(np.std(energias_finais, ddof=1) / np.sqrt(caminhos))
    desvio = abs(media_mc - esperado) / sigma
    resultados = [
        _resultado(
            "variancia_ou",
            "estocastico",
            desvio,
            3.0,
            detalhe=f"E‖u(T)‖²: MC {media_mc:.5e} vs exato {esperado:.5e} ({caminhos} caminhos)",
        )
    ]

    folga_media = np.mean(folgas, axis=0)
    variacao_media = np.mean(variacoes, axis=0)
    positivos = variacao_media > 0
    k_empirico = float(max(np.max(folga_media[positivos] / variacao_media[positivos]), 0.0))
    resultados.append(
        _resultado(
            "desigualdade_energia_k",
            "estocastico",
            k_empirico,
            3.0,
            detalhe="K empírico da média em caminhos de ‖u‖² + ν∫‖curl′u‖² − ‖u₀‖² sobre ∫‖G‖²_HS",
        )
    )
    return resultados


# --- ruido ---


def _verificar_ruido(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    resultados = []
    grade = obter_grade(6)
    modelo = ModeloRuido.padrao(grade, 3)
    escala, anel, limites, momentos = 0.0, 0.0, [], []
    for eps in contexto.lista_eps:
        geo = GeometriaCasca(eps, contexto.nr, grade)
        elevado = elevar_ruido(modelo, geo)
        poluido = elevar_ruido(modelo, geo, poluicao=True)
        for g, g_til, g_pol in zip(modelo.campos, elevado.campos, poluido.campos):
            escala = max(escala, abs(norma_casca(g_til) ** 2 - eps * norma(g) ** 2) / (eps * norma(g) ** 2))
            referencia = g.sintetizar()
            anel = max(
                anel,
                _distancia_tangente(media(TipoMedia.M_ANEL, g_pol), referencia)
                / _maximo(referencia.u_lambda, referencia.u_phi),
            )
        limites.append(verificar_limite_coeficientes(elevado, 1.0, 1e-2))
        momentos.append(momentos_escalonados(elevado, contexto.momento_p, 1.0, 1e-2))

    resultados.append(_resultado("escala_ruido_elevado", "ruido", escala, 1e-10))
    resultados.append(_resultado("media_ruido_poluido", "ruido", anel, 1e-10))
    resultados.append(
        _resultado("limite_coeficientes_constante", "ruido", (max(limites) - min(limites)) / max(limites), 1e-9)
    )
    momentos = np.stack(momentos)
    resultados.append(
        _resultado(
            "momentos_escalonados_constantes",
            "ruido",
            float(np.max(np.ptp(momentos, axis=0) / np.max(momentos, axis=0))),
            1e-9,
        )
    )

    dt = 1e-3
    caminho = amostrar_caminho(contexto.semente, 0, 1, dt, 100_000)
    incrementos = caminho.incrementos[:, 0]
    erro_padrao = dt * np.sqrt(2.0 / (incrementos.size - 1))
    resultados.append(
        _resultado(
            "variancia_incrementos",
            "ruido",
            abs(np.var(incrementos, ddof=1) - dt) / erro_padrao,
            3.0,
            detalhe="desvio em erros-padrão, 10⁵ incrementos",
        )
    )

    repetido = amostrar_caminho(contexto.semente, 0, 3, dt, 100)
    mesmo = amostrar_caminho(contexto.semente, 0, 3, dt, 100)
    outro = amostrar_caminho(contexto.semente, 1, 3, dt, 100)
    deterministico = (
        np.array_equal(repetido.incrementos, mesmo.incrementos)
        and np.array_equal(repetido.incrementos[:, 0], caminho.incrementos[:100, 0])
        and not np.array_equal(repetido.incrementos, outro.incrementos)
    )
    resultados.append(_resultado("determinismo_caminhos", "ruido", 0.0, None, passou=deterministico))
    return resultados


# --- momento ---


def _verificar_momento(contexto: ContextoSuite) -> List[ResultadoVerificacao]:
    """sup_t ‖β̃_ε‖^p / ε^{p/2} ao longo da varredura, com ruído e dados poluídos."""
    p = contexto.momento_p
    grade = obter_grade(4)
    modelo = ModeloRuido.padrao(grade, 3)
    dt, t_final = 1e-3, 0.05
    caminho = amostrar_caminho(contexto.semente, 0, modelo.N, dt, int(round(t_final / dt)))
    u0 = SolenoidalEspectral(
        grade, SolenoidalEspectral.modo(grade, 1, 0, 1.0).psi + SolenoidalEspectral.modo(grade, 2, 1, 0.5).psi
    )
    valores = []
    for eps in contexto.lista_eps:
        geo = GeometriaCasca(eps, 6, grade)
        base = obter_base(geo)
        config = ConfiguracaoSolucionadorCasca(
            geometria=geo, nu=0.1, dt=dt, t_final=t_final, ruido=elevar_ruido(modelo, geo, poluicao=True)
        )
        trajetoria = executar_casca(config, dados_iniciais_casca(base, u0, poluicao=1.0), caminho)
        flutuacao = np.asarray(trajetoria.energia_flutuacao)
        valores.append(float(np.max(flutuacao ** (p / 2))) / eps ** (p / 2))
    finitos = bool(np.all(np.isfinite(valores)))
    limitado = finitos and valores[-1] <= 10.0 * max(valores[0], 1e-300)
    detalhe = ", ".join(f"ε={e:g}: {v:.4e}" for e, v in zip(contexto.lista_eps, valores))
    return [_resultado(f"momento_p{p:g}", "momento", max(valores), None, passou=limitado, detalhe=detalhe)]


# Mapeamento seletor -> grupo de verificações
MAPEAMENTO_VERIFICACOES: Dict[str, Callable[[ContextoSuite], List[ResultadoVerificacao]]] = {
    "algebra": _verificar_algebra,
    "desigualdades": _verificar_desigualdades,
    "poincare": _verificar_poincare,
    "ladyzhenskaya": _verificar_ladyzhenskaya,
    "identidades": _verificar_identidades,
    "adjuncao": _verificar_adjuncao,
    "dinamica": _verificar_dinamica,
    "estocastico": _verificar_estocastico,
    "momento": _verificar_momento,
    "ruido": _verificar_ruido,
}

APELIDOS = {"moment": "momento", "all": "todas"}


def resolver_seletor(seletor: str) -> List[str]:
    """
    Converte o seletor (lista separada por vírgulas) em grupos conhecidos.

    Raises:
        ErroUso: Grupo desconhecido.

    Examples:
        >>> resolver_seletor("moment,algebra")
        ['momento', 'algebra']
    """
    grupos: List[str] = []
    for nome in (parte.strip().lower() for parte in (seletor or "todas").split(",")):
        if not nome:
            continue
        nome = APELIDOS.get(nome, nome)
        if nome == "todas":
            return list(MAPEAMENTO_VERIFICACOES)
        if nome not in MAPEAMENTO_VERIFICACOES:
            raise ErroUso(
                f"Seletor desconhecido '{nome}'. Opções: {', '.join(MAPEAMENTO_VERIFICACOES)}, todas.",
                "SeletorInvalido",
            )
        if nome not in grupos:
            grupos.append(nome)
    return grupos or list(MAPEAMENTO_VERIFICACOES)


def executar_suite(seletor: str = "todas", contexto: Optional[ContextoSuite] = None) -> List[ResultadoVerificacao]:
    """
    Executa os grupos selecionados.

    Um grupo que lança ErroSimulacao (ou outra exceção) vira uma linha de falha
    e os demais seguem.

    Returns:
        Lista de ResultadoVerificacao na ordem dos grupos.
    """
    contexto = contexto or ContextoSuite()
    resultados: List[ResultadoVerificacao] = []
    for grupo in resolver_seletor(seletor):
        logger.info(f"Executando grupo de verificações: {grupo}")
        try:
            resultados.extend(MAPEAMENTO_VERIFICACOES[grupo](contexto))
        except ErroSimulacao as e:
            logger.error(f"Grupo {grupo} interrompido: {e.mensagem}", exc_info=True)
            resultados.append(ResultadoVerificacao(nome=grupo, grupo=grupo, passou=False, detalhe=f"{e.tipo}: {e.mensagem}"))
        except Exception as e:
            logger.error(f"Erro inesperado no grupo {grupo}: {e}", exc_info=True)
            resultados.append(ResultadoVerificacao(nome=grupo, grupo=grupo, passou=False, detalhe=f"{type(e).__name__}: {e}"))
    falhas = sum(not r.passou for r in resultados)
    logger.info(f"Suíte concluída: {len(resultados)} verificações, {falhas} falha(s)")
    return resultados
